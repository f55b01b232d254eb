"""Pose-estimator port and the ground-truth oracle implementation.

The adapter-backed implementation lives in :mod:`geomcd.wire`; both share this
interface. The oracle looks up the harness ground truth and can add Gaussian
angle noise to emulate an imperfect network.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import InvalidConfig
from .harness import GroundTruth
from .types import Pose, normalize_pose


class PoseEstimatorPort(Protocol):
    def estimate(self, crop_pixels: np.ndarray, mesh_ref: str, *,
                 frame_index: int | None = None, object_id: str | None = None) -> Pose: ...


@dataclass
class OraclePoseEstimator:
    """Returns the ground-truth pose, optionally perturbed by Gaussian noise.

    The crop and mesh are accepted for interface parity but the lookup is by
    frame index and object id; a real estimator only sees the pixels.
    """

    truth: GroundTruth
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self._rng = np.random.default_rng(self.seed)

    def estimate(self, crop_pixels: np.ndarray, mesh_ref: str, *,
                 frame_index: int | None = None, object_id: str | None = None) -> Pose:
        if frame_index is None or object_id is None:
            raise InvalidConfig("the oracle estimator needs frame_index and object_id hints")
        pose = self.truth.frames[frame_index].poses[object_id]
        if self.noise_sigma == 0.0:
            return pose
        n_az, n_el, n_ip = self._rng.normal(0.0, self.noise_sigma, size=3)
        el = min(90.0, max(-90.0, pose.elevation + n_el))
        return normalize_pose(pose.azimuth + n_az, el, pose.inplane + n_ip)
