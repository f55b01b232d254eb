"""Pose mathematics: angular bin codec, Euler/rotation conversions, deltas, errors.

Euler convention (fixed for the whole artifact): extrinsic Z-X-Z,
``R = Rz(inplane) @ Rx(-elevation) @ Rz(-azimuth)``, angles in degrees at the
API boundary. Any one self-consistent convention works as long as the harness,
oracles, and adapters share it; this is that convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ElevationOutOfRange, InvalidBin, NotARotation, ZeroRealDelta
from .types import Pose, PoseDelta, normalize_pose, wrap_delta

ORTHONORMALITY_TOL = 1e-9


class AngleAxis(Enum):
    """The three pose axes and their canonical ranges."""

    AZIMUTH = ("azimuth", 0.0, 360.0, True)
    ELEVATION = ("elevation", -90.0, 90.0, False)
    INPLANE = ("inplane", -180.0, 180.0, True)

    def __init__(self, label: str, lo: float, hi: float, periodic: bool):
        self.label = label
        self.lo = lo
        self.hi = hi
        self.periodic = periodic

    @property
    def span(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class AngleBinCode:
    """Discretized angle: bin index over a uniform split plus an offset.

    The offset is a fraction of half a bin width, so +-1 reaches the bin edges
    and the codec covers the whole range.
    """

    l: int
    L: int
    delta: float
    axis: AngleAxis

    def __post_init__(self):
        if not 0 <= self.l < self.L:
            raise InvalidBin(f"bin index {self.l} outside 0..{self.L - 1}")
        if not -1.0 <= self.delta <= 1.0:
            raise InvalidBin(f"offset {self.delta} outside [-1, 1]")


def decode_angle(code: AngleBinCode) -> float:
    """Exact angle from a bin code: bin center plus offset times half a bin width."""
    bin_width = code.axis.span / code.L
    center = code.axis.lo + (code.l + 0.5) * bin_width
    return center + code.delta * bin_width / 2.0


def encode_angle(angle: float, L: int, axis: AngleAxis) -> AngleBinCode:
    """Inverse of :func:`decode_angle`; round-trips to 1e-9."""
    if L < 1:
        raise InvalidBin("bin count must be >= 1")
    if axis is AngleAxis.AZIMUTH:
        a = float(angle) % 360.0
    elif axis is AngleAxis.INPLANE:
        a = (float(angle) + 180.0) % 360.0 - 180.0
    else:
        a = float(angle)
        if abs(a) > 90.0 + 1e-9:
            raise ElevationOutOfRange(f"elevation {a} outside [-90, 90]")
        a = min(90.0, max(-90.0, a))
    bin_width = axis.span / L
    l = int(np.floor((a - axis.lo) / bin_width))
    l = min(max(l, 0), L - 1)
    center = axis.lo + (l + 0.5) * bin_width
    delta = (a - center) / (bin_width / 2.0)
    # Float division can land epsilon outside [-1, 1] at a bin edge.
    delta = min(1.0, max(-1.0, delta))
    return AngleBinCode(l=l, L=L, delta=delta, axis=axis)


def _rz(deg: float) -> np.ndarray:
    c, s = np.cos(np.radians(deg)), np.sin(np.radians(deg))
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rx(deg: float) -> np.ndarray:
    c, s = np.cos(np.radians(deg)), np.sin(np.radians(deg))
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def is_rotation(R: np.ndarray, tol: float = ORTHONORMALITY_TOL) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    return (
        np.allclose(R @ R.T, np.eye(3), atol=tol)
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def pose_to_rotation(p: Pose) -> np.ndarray:
    """Rotation matrix of a pose under the artifact's Z-X-Z convention."""
    return _rz(p.inplane) @ _rx(-p.elevation) @ _rz(-p.azimuth)


def rotation_to_pose(R: np.ndarray) -> Pose:
    """Recover a pose whose :func:`pose_to_rotation` reproduces ``R``.

    The Z-X-Z split is two-valued; the branch with azimuth in [0, 180) is
    returned. The chart is degenerate only at elevation 0, where azimuth and
    in-plane collapse to their difference: there all Z-rotation is assigned to
    the in-plane angle and azimuth is 0. Elevation +-90 is not degenerate for
    this convention and recovers uniquely.
    """
    R = np.asarray(R, dtype=float)
    if not is_rotation(R):
        raise NotARotation("matrix is not orthonormal with determinant 1")
    if R[2, 2] < -ORTHONORMALITY_TOL:
        # cos(elevation) < 0 has no elevation in [-90, 90].
        raise NotARotation("matrix has no pose with elevation in [-90, 90]")
    sin_el = float(np.hypot(R[2, 0], R[2, 1]))
    if sin_el < 1e-9:
        # elevation = 0: only inplane - azimuth is observable. Convention:
        # azimuth = 0, all Z-rotation in the in-plane angle.
        ip = np.degrees(np.arctan2(R[1, 0], R[0, 0]))
        return normalize_pose(0.0, 0.0, ip)
    az = np.degrees(np.arctan2(R[2, 0], -R[2, 1]))
    el = np.degrees(np.arctan2(sin_el, R[2, 2]))
    ip = np.degrees(np.arctan2(-R[0, 2], R[1, 2]))
    if not 0.0 <= az % 360.0 < 180.0:
        az, el, ip = az + 180.0, -el, ip + 180.0
    # R[2,2] within tolerance of 0 can put el epsilon past 90; clamp.
    return normalize_pose(az, min(90.0, max(-90.0, el)), ip)


def pose_delta(before: Pose, after: Pose) -> PoseDelta:
    """Componentwise wrapped difference after - before.

    Elevation is plain subtraction; the axis is not periodic.
    """
    return PoseDelta(
        d_azimuth=wrap_delta(after.azimuth - before.azimuth),
        d_elevation=after.elevation - before.elevation,
        d_inplane=wrap_delta(after.inplane - before.inplane),
    )


def percentage_error(real_delta: float, predicted_delta: float) -> float:
    """|real - predicted| / |real| * 100; undefined for a zero reference."""
    if real_delta == 0.0:
        raise ZeroRealDelta("percentage error is undefined for a zero real delta")
    return abs(real_delta - predicted_delta) / abs(real_delta) * 100.0
