"""Command-line surface: simulate, watch, reconstruct, eval, dmd.

Every command reads and writes plain files (JSON/CSV/PGM/PNG/OBJ) and is
deterministic given its inputs and flags. Exit codes: 0 success, 1 usage,
2 input/IO, 3 backend/protocol, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import shlex
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import changelog, detect, dmd, harness, mesh, pipeline, pose as posemod
from .errors import (
    CorruptLog,
    GeomcdError,
    InvalidConfig,
    IoFailure,
    MalformedObj,
    MalformedStl,
    ProtocolError,
)
from .estimators import OraclePoseEstimator
from .frameio import Manifest, png_bytes, read_frame, write_pgm
from .types import BoundingBox, Detection, GrayFrame, Pose, SceneObject, SceneState
from .wire import AdapterClient, AdapterDetector, AdapterPoseEstimator

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BACKEND, EXIT_INTERNAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write_effective_config(out_dir: Path, command: str, config: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(
        json.dumps({"command": command, **config}, indent=1, default=str)
    )


# ---------------------------------------------------------------------------
# simulate

CUBE_OBJ = """v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
"""


def cmd_simulate(args) -> int:
    cfg = harness.preset(args.preset, seed=args.seed, length=args.length,
                         frame_size=_parse_size(args.size))
    frames, truth = harness.generate(cfg)
    out = Path(args.out)
    frames_dir = out / "frames"
    masks_dir = out / "masks"
    meshes_dir = out / "meshes"
    for d in (frames_dir, masks_dir, meshes_dir):
        d.mkdir(parents=True, exist_ok=True)
    for f in frames:
        write_pgm(frames_dir / f"frame_{f.index:06d}.pgm", f)
    for t in range(cfg.length):
        mask = GrayFrame.from_array(truth.masks[t].astype(np.float64), index=t)
        write_pgm(masks_dir / f"mask_{t:06d}.pgm", mask)
    harness.save_truth(out / "truth.json", truth)

    objects = {}
    for obj in cfg.objects:
        mesh_path = meshes_dir / f"{obj.object_id}.obj"
        mesh_path.write_text(CUBE_OBJ)
        objects[obj.object_id] = {
            "mesh": str(mesh_path.relative_to(out)),
            "pose": truth.frames[0].poses[obj.object_id].as_dict(),
            "label": obj.label,
        }
    manifest = {
        "kind": "frame_dir",
        "path": "frames",
        "pattern": "frame_%06d.pgm",
        "width": cfg.frame_size[0],
        "height": cfg.frame_size[1],
        "fps": 30.0,
        "objects": objects,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    _write_effective_config(out, "simulate", {
        "preset": args.preset, "seed": args.seed, "length": args.length, "size": args.size,
    })
    print(f"wrote {len(frames)} frames, truth, and manifest to {out}")
    return EXIT_OK


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as e:
        raise UsageError(f"--size must look like 64x64, got {text!r}") from e


# ---------------------------------------------------------------------------
# watch

def _pipeline_config(args) -> pipeline.PipelineConfig:
    try:
        return pipeline.PipelineConfig(
            rescale_factor=args.rescale,
            window_len=args.window_len,
            window_stride=args.window_stride,
            motion_pixel_fraction=args.motion_fraction,
            mask_threshold=args.mask_threshold,
            quiescent_windows_to_close=args.quiescent,
            lighting_guard=args.lighting_guard,
        )
    except InvalidConfig as e:
        raise UsageError(str(e)) from e


def _make_backends(args):
    """Build (detector, estimator, closer) from the backend selector flags."""
    clients: list[AdapterClient] = []

    def build(spec: str, role: str):
        kind, _, rest = spec.partition(":")
        if kind == "oracle":
            truth_path = rest or args.truth
            if not truth_path:
                raise UsageError(f"{role} oracle backend needs oracle:TRUTH.json or --truth")
            truth = harness.load_truth(truth_path)
            if role == "detector":
                return detect.OracleDetector(truth)
            return OraclePoseEstimator(truth, noise_sigma=args.pose_noise, seed=args.seed)
        if kind == "adapter":
            if not rest:
                raise UsageError(f"{role} adapter backend needs adapter:COMMAND")
            client = AdapterClient(shlex.split(rest))
            clients.append(client)
            if role == "detector":
                return AdapterDetector(client)
            return AdapterPoseEstimator(client)
        raise UsageError(f"unknown {role} backend {spec!r}; use oracle[:truth] or adapter:cmd")

    detector = build(args.detector, "detector")
    estimator = build(args.pose, "pose")
    return detector, estimator, lambda: [c.close() for c in clients]


def cmd_watch(args) -> int:
    manifest = Manifest.load(args.manifest)
    cfg = _pipeline_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    detector, estimator, close_backends = _make_backends(args)
    try:
        intervals = pipeline.segment_stream(manifest.frames(), cfg)

        log_path = out / "events.log"
        if log_path.exists():
            raise IoFailure(f"{log_path} already exists; choose a fresh --out")
        log = changelog.EventLog(log_path, out / "evidence")
        initial = SceneState(
            objects={
                oid: SceneObject(mesh_ref=entry.mesh, pose=entry.pose)
                for oid, entry in manifest.objects.items()
            },
            as_of_frame=-1,
        )
        now = datetime.datetime.now(datetime.timezone.utc).isoformat()
        log.create(scene_id=str(Path(args.manifest)), created_at=now, initial_state=initial)

        label_to_oid = {entry.label: oid for oid, entry in manifest.objects.items()}
        current = {oid: entry.pose for oid, entry in manifest.objects.items()}
        report_lines = []
        n_events = 0
        for iv in intervals:
            evidence = log.store_evidence(png_bytes(iv.last_frame))
            report_lines.append(
                f"interval t1={iv.t1} t2={iv.t2} "
                f"scores={[(t, round(s, 4)) for t, s in iv.score_trace]}"
            )
            for det in detector.detect(iv.last_frame):
                oid = label_to_oid.get(det.class_label)
                if oid is None:
                    report_lines.append(f"  unmatched label {det.class_label!r}")
                    continue
                crop_px = detect.crop(iv.last_frame, det.bbox)
                estimated = estimator.estimate(
                    crop_px, manifest.objects[oid].mesh,
                    frame_index=iv.last_frame.index, object_id=oid,
                )
                delta = posemod.pose_delta(current[oid], estimated)
                event = changelog.ChangeEvent(
                    object_id=oid,
                    frame_index=iv.t2,
                    timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
                    delta=delta,
                    evidence=evidence,
                )
                log.append_event(event)
                n_events += 1
                current[oid] = estimated
                report_lines.append(
                    f"  object {oid}: d_azimuth={delta.d_azimuth:+.3f} "
                    f"d_elevation={delta.d_elevation:+.3f} d_inplane={delta.d_inplane:+.3f}"
                )
        (out / "report.txt").write_text("\n".join(report_lines) + "\n")
        _write_effective_config(out, "watch", {
            "manifest": str(args.manifest), "detector": args.detector, "pose": args.pose,
            "pipeline": asdict(cfg),
        })
        print(f"{len(intervals)} interval(s), {n_events} event(s); log at {log_path}")
        return EXIT_OK
    finally:
        close_backends()


# ---------------------------------------------------------------------------
# reconstruct

def cmd_reconstruct(args) -> int:
    log = changelog.EventLog(Path(args.log))
    state = log.replay(args.at)
    doc = json.dumps(state.as_dict(), indent=1)
    if args.out:
        Path(args.out).write_text(doc)
    else:
        print(doc)
    if args.emit_meshes:
        emit = Path(args.emit_meshes)
        emit.mkdir(parents=True, exist_ok=True)
        for oid, obj in state.objects.items():
            m = mesh.parse_obj(Path(obj.mesh_ref).read_text())
            R = posemod.pose_to_rotation(obj.pose)
            transformed = mesh.transform_mesh(m, R)
            (emit / f"{oid}.obj").write_text(mesh.write_obj(transformed))
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval

def cmd_eval(args) -> int:
    pred_doc = json.loads(Path(args.pred).read_text())
    truth = harness.load_truth(args.truth)
    predictions = {
        int(img): [
            Detection(
                class_label=d["label"],
                bbox=BoundingBox(*[float(v) for v in d["bbox"]]),
                confidence=float(d["confidence"]),
            )
            for d in dets
        ]
        for img, dets in pred_doc["images"].items()
    }
    ground_truth = {
        t: [
            detect.LabeledBox(class_label=ft.labels[oid], bbox=ft.boxes[oid])
            for oid in ft.boxes
        ]
        for t, ft in enumerate(truth.frames)
    }
    report = detect.evaluate_map(predictions, ground_truth, iou_threshold=args.iou)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps({
        "mAP": report.mAP,
        "per_class_ap": report.per_class_ap,
        "undefined_classes": list(report.undefined_classes),
        "iou_threshold": args.iou,
    }, indent=1))
    with open(out / "pr_curves.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class", "recall", "precision"])
        for cls, curve in report.pr_curves.items():
            for r, p in curve:
                writer.writerow([cls, f"{r:.6f}", f"{p:.6f}"])
    _write_effective_config(out, "eval", {"pred": args.pred, "truth": args.truth, "iou": args.iou})
    print(f"mAP = {report.mAP:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# dmd

def cmd_dmd(args) -> int:
    if args.window_stride > args.window_len:
        raise UsageError("--window-stride must not exceed --window-len")
    frames_dir = Path(args.frames)
    frames = []
    index = 0
    while True:
        hits = [p for ext in ("pgm", "png") if (p := frames_dir / f"frame_{index:06d}.{ext}").exists()]
        if not hits:
            break
        frames.append(read_frame(hits[0], index=index))
        index += 1
    if len(frames) < args.window_len:
        raise IoFailure(
            f"found {len(frames)} frames in {frames_dir}, need at least {args.window_len}"
        )
    out = Path(args.out)
    for sub in ("background", "foreground", "mask"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    cfg = pipeline.PipelineConfig(
        rescale_factor=args.rescale, window_len=args.window_len,
        window_stride=args.window_stride, mask_threshold=args.mask_threshold,
    )
    for start in range(0, len(frames) - args.window_len + 1, args.window_stride):
        window = [pipeline.rescale_gray(f, cfg.rescale_factor)
                  for f in frames[start:start + args.window_len]]
        snap = dmd.build_snapshots(window)
        model = dmd.compute_dmd(snap, dmd.RankPolicy(energy=cfg.rank_energy))
        partition = dmd.classify_modes(model, epsilon=cfg.mode_epsilon)
        last = window[-1]
        background = dmd.background_frame(
            model, partition, k=len(window) - 1, width=last.width, height=last.height
        )
        residual = dmd.foreground_residual(last, background)
        mask = dmd.foreground_mask(residual, cfg.mask_threshold)
        end_idx = frames[start + args.window_len - 1].index
        write_pgm(out / "background" / f"background_{end_idx:06d}.pgm", background)
        fg = np.clip(np.abs(residual).reshape(last.height, last.width), 0.0, 1.0)
        write_pgm(out / "foreground" / f"foreground_{end_idx:06d}.pgm",
                  GrayFrame.from_array(fg, index=end_idx))
        write_pgm(out / "mask" / f"mask_{end_idx:06d}.pgm",
                  GrayFrame.from_array(mask.reshape(last.height, last.width).astype(float),
                                       index=end_idx))
    _write_effective_config(out, "dmd", {
        "frames": str(frames_dir), "window_len": args.window_len,
        "window_stride": args.window_stride, "rescale": args.rescale,
        "mask_threshold": args.mask_threshold,
    })
    print(f"wrote window outputs to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="geomcd", description="Geometric change detection pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic scenario")
    p.add_argument("--preset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--size", default="64x64")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("watch", help="run the change-detection pipeline over a stream")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--detector", default="oracle")
    p.add_argument("--pose", default="oracle")
    p.add_argument("--truth", default=None, help="truth file for oracle backends")
    p.add_argument("--pose-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rescale", type=float, default=0.25)
    p.add_argument("--window-len", type=int, default=30)
    p.add_argument("--window-stride", type=int, default=15)
    p.add_argument("--motion-fraction", type=float, default=0.005)
    p.add_argument("--mask-threshold", type=float, default=0.1)
    p.add_argument("--quiescent", type=int, default=2)
    p.add_argument("--lighting-guard", action="store_true")
    p.set_defaults(func=cmd_watch)

    p = sub.add_parser("reconstruct", help="replay the event log into a scene state")
    p.add_argument("--log", required=True)
    p.add_argument("--at", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--emit-meshes", default=None)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("eval", help="mAP / precision-recall evaluation")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dmd", help="emit per-window background/foreground/mask images")
    p.add_argument("--frames", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window-len", type=int, default=30)
    p.add_argument("--window-stride", type=int, default=15)
    p.add_argument("--rescale", type=float, default=1.0)
    p.add_argument("--mask-threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_dmd)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (IoFailure, MalformedStl, MalformedObj, CorruptLog, InvalidConfig) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError, KeyError) as e:
        print(f"input error: {e!r}", file=sys.stderr)
        return EXIT_INPUT
    except ProtocolError as e:
        print(f"backend error: {e}", file=sys.stderr)
        return EXIT_BACKEND
    except GeomcdError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
