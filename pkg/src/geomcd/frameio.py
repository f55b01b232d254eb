"""Frame file I/O: 8-bit PGM (P5) and PNG, frame directories, raw streams, manifests.

Intensities are quantized to 8 bits only here; everything upstream works on
reals in [0, 1].
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
from PIL import Image

from .errors import IoFailure
from .types import GrayFrame, Pose, normalize_pose


def to_bytes_gray(frame: GrayFrame) -> np.ndarray:
    """Quantize intensities to uint8 by rounding."""
    return np.round(frame.pixels * 255.0).astype(np.uint8)


def from_bytes_gray(raw: np.ndarray, index: int = 0) -> GrayFrame:
    return GrayFrame.from_array(raw.astype(np.float64) / 255.0, index=index)


def write_pgm(path: Path | str, frame: GrayFrame) -> None:
    data = to_bytes_gray(frame)
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + data.tobytes())


def read_pgm(path: Path | str, index: int = 0) -> GrayFrame:
    data = Path(path).read_bytes()
    m = re.match(rb"P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(\d+)\s+(\d+)\s", data)
    if not m:
        raise IoFailure(f"{path}: not a binary PGM (P5) file")
    w, h, maxval = int(m.group(1)), int(m.group(2)), int(m.group(3))
    if maxval != 255:
        raise IoFailure(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    body = data[m.end():]
    if len(body) < w * h:
        raise IoFailure(f"{path}: truncated PGM body")
    raw = np.frombuffer(body[: w * h], dtype=np.uint8).reshape(h, w)
    return from_bytes_gray(raw, index=index)


def write_png(path: Path | str, frame: GrayFrame) -> None:
    Image.fromarray(to_bytes_gray(frame), mode="L").save(str(path), format="PNG")


def read_png(path: Path | str, index: int = 0) -> GrayFrame:
    img = Image.open(str(path)).convert("L")
    return from_bytes_gray(np.asarray(img), index=index)


def png_bytes(frame: GrayFrame) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(to_bytes_gray(frame), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def frame_from_png_bytes(data: bytes, index: int = 0) -> GrayFrame:
    img = Image.open(io.BytesIO(data)).convert("L")
    return from_bytes_gray(np.asarray(img), index=index)


def read_frame(path: Path | str, index: int = 0) -> GrayFrame:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path, index=index)
    if path.suffix.lower() == ".png":
        return read_png(path, index=index)
    raise IoFailure(f"{path}: unsupported frame format {path.suffix!r}")


@dataclass(frozen=True)
class ObjectEntry:
    """One registered scene object: mesh path, initial pose, detector label."""

    mesh: str
    pose: Pose
    label: str


@dataclass(frozen=True)
class Manifest:
    """Input description for the watch pipeline.

    kind is "frame_dir" (numbered image files under path, named per pattern)
    or "raw_stream" (width x height 8-bit frames concatenated in one file).
    """

    kind: str
    path: str
    width: int
    height: int
    fps: float = 30.0
    pattern: str = "frame_%06d.pgm"
    objects: dict[str, ObjectEntry] = field(default_factory=dict)

    @classmethod
    def load(cls, manifest_path: Path | str) -> "Manifest":
        manifest_path = Path(manifest_path)
        try:
            doc = json.loads(manifest_path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise IoFailure(f"cannot read manifest {manifest_path}: {e}") from e
        base = manifest_path.parent
        kind = doc.get("kind")
        if kind not in ("frame_dir", "raw_stream"):
            raise IoFailure(f"manifest kind must be frame_dir or raw_stream, got {kind!r}")
        objects = {}
        for oid, entry in doc.get("objects", {}).items():
            p = entry["pose"]
            mesh = str((base / entry["mesh"]).resolve())
            if not Path(mesh).exists():
                raise IoFailure(f"manifest object {oid}: mesh {mesh} does not exist")
            objects[oid] = ObjectEntry(
                mesh=mesh,
                pose=normalize_pose(p["azimuth"], p["elevation"], p["inplane"]),
                label=entry.get("label", oid),
            )
        path = str((base / doc["path"]).resolve())
        if not Path(path).exists():
            raise IoFailure(f"manifest input path {path} does not exist")
        return cls(
            kind=kind,
            path=path,
            width=int(doc["width"]),
            height=int(doc["height"]),
            fps=float(doc.get("fps", 30.0)),
            pattern=doc.get("pattern", "frame_%06d.pgm"),
            objects=objects,
        )

    def frames(self) -> Iterator[GrayFrame]:
        """Yield frames in index order."""
        if self.kind == "frame_dir":
            yield from self._frame_dir_frames()
        else:
            yield from self._raw_stream_frames()

    def _frame_dir_frames(self) -> Iterator[GrayFrame]:
        index = 0
        while True:
            path = Path(self.path) / (self.pattern % index)
            if not path.exists():
                if index == 0:
                    raise IoFailure(f"no frames matching {self.pattern!r} in {self.path}")
                return
            yield read_frame(path, index=index)
            index += 1

    def _raw_stream_frames(self) -> Iterator[GrayFrame]:
        frame_bytes = self.width * self.height
        with open(self.path, "rb") as fh:
            index = 0
            while True:
                chunk = fh.read(frame_bytes)
                if not chunk:
                    return
                if len(chunk) < frame_bytes:
                    raise IoFailure(f"{self.path}: truncated raw stream at frame {index}")
                raw = np.frombuffer(chunk, dtype=np.uint8).reshape(self.height, self.width)
                yield from_bytes_gray(raw, index=index)
                index += 1
