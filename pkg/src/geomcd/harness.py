"""Deterministic synthetic scene generator with full ground truth.

Renders 2D sprites (square, disk, L-shape) over flat, gradient, or drifting
backgrounds, with optional lighting steps and pixel noise, and records the
exact motion schedule, per-frame boxes, poses, and occupancy masks. Presets
mirror the disturbance regimes the motion detector is known to struggle with:
a dynamic background, a sudden lighting step, and foreground matching the
background intensity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfig
from .types import BoundingBox, GrayFrame, Pose, normalize_pose

SUPERSAMPLE = 4  # anti-aliasing rule: 4x4 subpixel coverage per pixel


@dataclass(frozen=True)
class MotionSegment:
    """Linear move/rotation between two keyframes; frames outside segments are static."""

    t_start: int
    t_end: int
    pos_start: tuple[float, float]
    pos_end: tuple[float, float]
    rot_start: float = 0.0
    rot_end: float = 0.0

    def is_motion(self) -> bool:
        return self.pos_start != self.pos_end or self.rot_start != self.rot_end


@dataclass(frozen=True)
class ObjectSpec:
    object_id: str
    sprite: str  # square | disk | lshape
    intensity: float
    size_px: float
    schedule: tuple[MotionSegment, ...]
    class_label: str = ""
    base_azimuth: float = 0.0
    base_elevation: float = 0.0

    @property
    def label(self) -> str:
        return self.class_label or self.sprite


@dataclass(frozen=True)
class BackgroundSpec:
    kind: str = "flat"  # flat | gradient | dynamic
    intensity: float = 0.2
    contrast: float = 0.3     # peak-to-peak amplitude for gradient/dynamic
    drift_px: float = 1.0     # texture drift per frame (dynamic only)
    wavelength: float = 16.0  # texture wavelength in pixels (dynamic only)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    frame_size: tuple[int, int] = (64, 64)  # (width, height)
    length: int = 60
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    objects: tuple[ObjectSpec, ...] = ()
    lighting_step: tuple[int, float] | None = None  # (frame index, intensity delta)
    noise_sigma: float = 0.01

    def __post_init__(self):
        if self.length < 1:
            raise InvalidConfig("length must be >= 1")
        w, h = self.frame_size
        if w < 4 or h < 4:
            raise InvalidConfig("frame_size must be at least 4x4")
        for obj in self.objects:
            for seg in obj.schedule:
                if not 0 <= seg.t_start <= seg.t_end < self.length:
                    raise InvalidConfig(
                        f"object {obj.object_id}: segment [{seg.t_start},{seg.t_end}] "
                        f"outside stream of length {self.length}"
                    )
            starts = [s.t_start for s in obj.schedule]
            if starts != sorted(starts):
                raise InvalidConfig(f"object {obj.object_id}: schedule not ordered")


@dataclass(frozen=True)
class FrameTruth:
    """Per-frame, per-object ground truth."""

    boxes: dict[str, BoundingBox]
    poses: dict[str, Pose]
    labels: dict[str, str]


@dataclass(frozen=True)
class GroundTruth:
    frames: tuple[FrameTruth, ...]
    intervals: tuple[tuple[int, int], ...]
    masks: np.ndarray  # (length, h, w) bool: union sprite occupancy >= 50%

    def mask_at(self, t: int) -> np.ndarray:
        return self.masks[t]


def _object_state(obj: ObjectSpec, t: int) -> tuple[float, float, float]:
    """(x, y, rotation degrees) of an object at frame t."""
    x, y = obj.schedule[0].pos_start if obj.schedule else (0.0, 0.0)
    rot = obj.schedule[0].rot_start if obj.schedule else 0.0
    for seg in obj.schedule:
        if t < seg.t_start:
            break
        if t >= seg.t_end:
            x, y, rot = *seg.pos_end, seg.rot_end
        else:
            a = (t - seg.t_start) / (seg.t_end - seg.t_start)
            x = seg.pos_start[0] + a * (seg.pos_end[0] - seg.pos_start[0])
            y = seg.pos_start[1] + a * (seg.pos_end[1] - seg.pos_start[1])
            rot = seg.rot_start + a * (seg.rot_end - seg.rot_start)
    return x, y, rot


def _inside_sprite(sprite: str, u: np.ndarray, v: np.ndarray, half: float) -> np.ndarray:
    """Membership test in the sprite's own frame, centered at the origin."""
    if sprite == "square":
        return (np.abs(u) <= half) & (np.abs(v) <= half)
    if sprite == "disk":
        return u * u + v * v <= half * half
    if sprite == "lshape":
        full = (np.abs(u) <= half) & (np.abs(v) <= half)
        notch = (u > 0) & (v < 0)
        return full & ~notch
    raise InvalidConfig(f"unknown sprite {sprite!r}")


def _coverage(obj: ObjectSpec, w: int, h: int, x: float, y: float, rot: float) -> np.ndarray:
    """Subpixel coverage fraction of the sprite over each pixel."""
    half = obj.size_px / 2.0
    ss = SUPERSAMPLE
    offs = (np.arange(ss) + 0.5) / ss
    xs = np.arange(w)[None, :, None, None] + offs[None, None, None, :]
    ys = np.arange(h)[:, None, None, None] + offs[None, None, :, None]
    # Inverse-rotate sample points into the sprite frame.
    c, s = np.cos(np.radians(rot)), np.sin(np.radians(rot))
    du, dv = xs - x, ys - y
    u = c * du + s * dv
    v = -s * du + c * dv
    inside = _inside_sprite(obj.sprite, u, v, half)
    return inside.mean(axis=(2, 3))


def _background(cfg: ScenarioConfig, t: int) -> np.ndarray:
    w, h = cfg.frame_size
    bg = cfg.background
    if bg.kind == "flat":
        return np.full((h, w), bg.intensity)
    if bg.kind == "gradient":
        ramp = np.linspace(-0.5, 0.5, w)[None, :]
        return np.clip(bg.intensity + bg.contrast * ramp, 0.0, 1.0) * np.ones((h, 1))
    if bg.kind == "dynamic":
        xs = np.arange(w)[None, :] + np.zeros((h, 1))
        phase = 2.0 * np.pi * (xs - bg.drift_px * t) / bg.wavelength
        return np.clip(bg.intensity + 0.5 * bg.contrast * np.sin(phase), 0.0, 1.0)
    raise InvalidConfig(f"unknown background kind {bg.kind!r}")


def generate(cfg: ScenarioConfig) -> tuple[list[GrayFrame], GroundTruth]:
    """Render the scenario; deterministic for a fixed config (seeded noise)."""
    w, h = cfg.frame_size
    rng = np.random.default_rng(cfg.seed)
    frames: list[GrayFrame] = []
    frame_truths: list[FrameTruth] = []
    masks = np.zeros((cfg.length, h, w), dtype=bool)

    for t in range(cfg.length):
        img = _background(cfg, t)
        if cfg.lighting_step and t >= cfg.lighting_step[0]:
            img = img + cfg.lighting_step[1]
        boxes: dict[str, BoundingBox] = {}
        poses: dict[str, Pose] = {}
        labels: dict[str, str] = {}
        for obj in cfg.objects:
            x, y, rot = _object_state(obj, t)
            cov = _coverage(obj, w, h, x, y, rot)
            img = img * (1.0 - cov) + obj.intensity * cov
            occupied = cov >= 0.5
            masks[t] |= occupied
            ys, xs = np.nonzero(occupied)
            if len(xs):
                boxes[obj.object_id] = BoundingBox(
                    x_min=float(xs.min()), y_min=float(ys.min()),
                    x_max=float(xs.max() + 1), y_max=float(ys.max() + 1),
                )
            poses[obj.object_id] = normalize_pose(obj.base_azimuth, obj.base_elevation, rot)
            labels[obj.object_id] = obj.label
        if cfg.noise_sigma > 0.0:
            img = img + rng.normal(0.0, cfg.noise_sigma, size=img.shape)
        frames.append(GrayFrame.from_array(np.clip(img, 0.0, 1.0), index=t))
        frame_truths.append(FrameTruth(boxes=boxes, poses=poses, labels=labels))

    intervals = _merge_intervals(
        [(seg.t_start, seg.t_end) for obj in cfg.objects for seg in obj.schedule if seg.is_motion()]
    )
    truth = GroundTruth(frames=tuple(frame_truths), intervals=tuple(intervals), masks=masks)
    return frames, truth


def _merge_intervals(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for lo, hi in sorted(spans):
        if out and lo <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


# ---------------------------------------------------------------------------
# Presets

PRESETS = ("baseline", "dynamic_background", "lighting_step", "monochrome")


def preset(name: str, seed: int = 0, length: int = 60,
           frame_size: tuple[int, int] = (64, 64)) -> ScenarioConfig:
    """Built-in scenarios; motion always occupies frames [20, 40]."""
    w, h = frame_size
    mover = ObjectSpec(
        object_id="obj1",
        sprite="square",
        intensity=0.95,
        size_px=13.0,
        class_label="block",
        schedule=(
            MotionSegment(
                t_start=20, t_end=40,
                pos_start=(w * 0.25, h * 0.5), pos_end=(w * 0.7, h * 0.5),
                rot_start=0.0, rot_end=30.0,
            ),
        ),
    )
    if name == "baseline":
        return ScenarioConfig(seed=seed, frame_size=frame_size, length=length,
                              objects=(mover,))
    if name == "dynamic_background":
        return ScenarioConfig(
            seed=seed, frame_size=frame_size, length=length, objects=(mover,),
            background=BackgroundSpec(kind="dynamic", intensity=0.4),
        )
    if name == "lighting_step":
        static = ObjectSpec(
            object_id="obj1", sprite="square", intensity=0.95, size_px=13.0,
            class_label="block",
            schedule=(MotionSegment(0, 0, (w * 0.25, h * 0.5), (w * 0.25, h * 0.5)),),
        )
        return ScenarioConfig(seed=seed, frame_size=frame_size, length=length,
                              objects=(static,), lighting_step=(length // 2, 0.3))
    if name == "monochrome":
        mono = ObjectSpec(
            object_id="obj1", sprite="square", intensity=0.2, size_px=13.0,
            class_label="block", schedule=mover.schedule,
        )
        return ScenarioConfig(seed=seed, frame_size=frame_size, length=length,
                              objects=(mono,))
    raise InvalidConfig(f"unknown preset {name!r}; choose one of {PRESETS}")


# ---------------------------------------------------------------------------
# Truth (de)serialization, used by the CLI and the oracle backends.

def truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "intervals": [list(iv) for iv in truth.intervals],
        "frames": [
            {
                oid: {
                    "bbox": ft.boxes[oid].as_list() if oid in ft.boxes else None,
                    "pose": ft.poses[oid].as_dict(),
                    "label": ft.labels[oid],
                }
                for oid in ft.poses
            }
            for ft in truth.frames
        ],
    }


def truth_from_dict(doc: dict, masks: np.ndarray | None = None) -> GroundTruth:
    frames = []
    for entry in doc["frames"]:
        boxes, poses, labels = {}, {}, {}
        for oid, rec in entry.items():
            if rec["bbox"] is not None:
                boxes[oid] = BoundingBox(*rec["bbox"])
            p = rec["pose"]
            poses[oid] = normalize_pose(p["azimuth"], p["elevation"], p["inplane"])
            labels[oid] = rec["label"]
        frames.append(FrameTruth(boxes=boxes, poses=poses, labels=labels))
    if masks is None:
        masks = np.zeros((len(frames), 1, 1), dtype=bool)
    return GroundTruth(
        frames=tuple(frames),
        intervals=tuple(tuple(iv) for iv in doc["intervals"]),
        masks=masks,
    )


def save_truth(path: Path | str, truth: GroundTruth) -> None:
    Path(path).write_text(json.dumps(truth_to_dict(truth), indent=1))


def load_truth(path: Path | str) -> GroundTruth:
    return truth_from_dict(json.loads(Path(path).read_text()))
