"""Shared domain types: frames, boxes, poses, deltas, change events, scene state.

All types are immutable values after construction and safe to share between
threads. Frame intensities are kept as reals in [0, 1]; quantization to 8-bit
happens only at file I/O boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ElevationOutOfRange

ELEVATION_SLACK = 1e-9


def wrap_360(angle: float) -> float:
    """Wrap an angle into [0, 360)."""
    a = float(angle) % 360.0
    # x % 360 can round up to 360.0 for tiny negative x.
    return 0.0 if a >= 360.0 else a


def wrap_180(angle: float) -> float:
    """Wrap an angle into [-180, 180)."""
    a = (float(angle) + 180.0) % 360.0 - 180.0
    return -180.0 if a >= 180.0 else a


def wrap_delta(angle: float) -> float:
    """Wrap an angle difference into (-180, 180]."""
    return 180.0 - (180.0 - float(angle)) % 360.0


@dataclass(frozen=True)
class GrayFrame:
    """A grayscale frame with intensities in [0, 1], stored row-major."""

    width: int
    height: int
    pixels: np.ndarray  # shape (height, width), float64
    index: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array shape {px.shape} != (height={self.height}, width={self.width})"
            )
        if px.size and (px.min() < 0.0 or px.max() > 1.0):
            raise ValueError("intensities must lie in [0, 1]")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, pixels: np.ndarray, index: int = 0) -> "GrayFrame":
        pixels = np.asarray(pixels, dtype=np.float64)
        h, w = pixels.shape
        return cls(width=w, height=h, pixels=pixels, index=index)

    def flatten(self) -> np.ndarray:
        """Row-major state vector of length width*height."""
        return self.pixels.reshape(-1)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box; max edges are exclusive."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("bounding box must have positive extent")

    def within(self, width: int, height: int) -> bool:
        return self.x_min >= 0 and self.y_min >= 0 and self.x_max <= width and self.y_max <= height

    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ix = max(0.0, min(a.x_max, b.x_max) - max(a.x_min, b.x_min))
    iy = max(0.0, min(a.y_max, b.y_max) - max(a.y_min, b.y_min))
    inter = ix * iy
    if inter <= 0.0:
        return 0.0
    return inter / (a.area() + b.area() - inter)


@dataclass(frozen=True)
class Detection:
    """A labeled localization with confidence."""

    class_label: str
    bbox: BoundingBox
    confidence: float

    def __post_init__(self):
        if not self.class_label:
            raise ValueError("class_label must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


@dataclass(frozen=True)
class Pose:
    """Euler-angle camera pose: azimuth [0,360), elevation [-90,90], in-plane [-180,180).

    Construct through :func:`normalize_pose` unless the values are already
    canonical.
    """

    azimuth: float
    elevation: float
    inplane: float

    def __post_init__(self):
        if not 0.0 <= self.azimuth < 360.0:
            raise ValueError("azimuth must lie in [0, 360)")
        if not -90.0 <= self.elevation <= 90.0:
            raise ValueError("elevation must lie in [-90, 90]")
        if not -180.0 <= self.inplane < 180.0:
            raise ValueError("inplane must lie in [-180, 180)")

    def as_dict(self) -> dict:
        return {"azimuth": self.azimuth, "elevation": self.elevation, "inplane": self.inplane}


def normalize_pose(raw_azimuth: float, raw_elevation: float, raw_inplane: float) -> Pose:
    """Wrap raw angles into the canonical pose ranges.

    Azimuth and in-plane are periodic and wrapped; elevation is not periodic
    and is rejected outside [-90, 90] (a tiny numerical slack is clamped).
    """
    el = float(raw_elevation)
    if abs(el) > 90.0 + ELEVATION_SLACK:
        raise ElevationOutOfRange(f"elevation {el} outside [-90, 90]")
    el = min(90.0, max(-90.0, el))
    return Pose(azimuth=wrap_360(raw_azimuth), elevation=el, inplane=wrap_180(raw_inplane))


@dataclass(frozen=True)
class PoseDelta:
    """Rotational change between two poses; translation is reserved and always zero."""

    d_azimuth: float
    d_elevation: float
    d_inplane: float
    d_translation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for v in (self.d_azimuth, self.d_inplane):
            if not -180.0 < v <= 180.0:
                raise ValueError("rotational delta components must lie in (-180, 180]")
        if not -180.0 < self.d_elevation <= 180.0:
            raise ValueError("rotational delta components must lie in (-180, 180]")
        if tuple(self.d_translation) != (0.0, 0.0, 0.0):
            raise ValueError("translation estimation is not supported; d_translation must be zero")

    def as_dict(self) -> dict:
        return {
            "d_azimuth": self.d_azimuth,
            "d_elevation": self.d_elevation,
            "d_inplane": self.d_inplane,
            "d_translation": list(self.d_translation),
        }


def apply_delta(pose: Pose, delta: PoseDelta) -> Pose:
    """Apply a delta to a pose componentwise with wrapping.

    Elevation is linear; a sum drifting outside [-90, 90] is clamped.
    """
    el = pose.elevation + delta.d_elevation
    el = min(90.0, max(-90.0, el))
    return Pose(
        azimuth=wrap_360(pose.azimuth + delta.d_azimuth),
        elevation=el,
        inplane=wrap_180(pose.inplane + delta.d_inplane),
    )


@dataclass(frozen=True)
class ChangeEvent:
    """One archived motion episode: object, frame, delta, and evidence hash."""

    object_id: str
    frame_index: int
    timestamp: str  # ISO-8601 wall clock of archival
    delta: PoseDelta
    evidence: str  # SHA-256 hex of the archived frame bytes

    def as_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "frame_index": self.frame_index,
            "timestamp": self.timestamp,
            "delta": self.delta.as_dict(),
            "evidence": self.evidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChangeEvent":
        delta = d["delta"]
        return cls(
            object_id=d["object_id"],
            frame_index=int(d["frame_index"]),
            timestamp=d["timestamp"],
            delta=PoseDelta(
                d_azimuth=float(delta["d_azimuth"]),
                d_elevation=float(delta["d_elevation"]),
                d_inplane=float(delta["d_inplane"]),
                d_translation=tuple(delta.get("d_translation", (0.0, 0.0, 0.0))),
            ),
            evidence=d["evidence"],
        )


@dataclass(frozen=True)
class SceneObject:
    """One tracked object: its mesh reference and current pose."""

    mesh_ref: str
    pose: Pose

    def as_dict(self) -> dict:
        return {"mesh_ref": self.mesh_ref, "pose": self.pose.as_dict()}


@dataclass(frozen=True)
class SceneState:
    """The replayable digital-twin state at a given frame."""

    objects: dict[str, SceneObject] = field(default_factory=dict)
    as_of_frame: int = -1

    def with_pose(self, object_id: str, pose: Pose, as_of_frame: int) -> "SceneState":
        objs = dict(self.objects)
        objs[object_id] = replace(objs[object_id], pose=pose)
        return SceneState(objects=objs, as_of_frame=as_of_frame)

    def as_dict(self) -> dict:
        return {
            "as_of_frame": self.as_of_frame,
            "objects": {k: v.as_dict() for k, v in self.objects.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneState":
        objects = {
            k: SceneObject(
                mesh_ref=v["mesh_ref"],
                pose=Pose(
                    azimuth=float(v["pose"]["azimuth"]),
                    elevation=float(v["pose"]["elevation"]),
                    inplane=float(v["pose"]["inplane"]),
                ),
            )
            for k, v in d["objects"].items()
        }
        return cls(objects=objects, as_of_frame=int(d.get("as_of_frame", -1)))
