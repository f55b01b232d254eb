"""Orientation math: angular bin codec, rotation matrices, and pose deltas.

Shows how an angle becomes a (bin, offset) pair and back, how a pose maps to
a rotation matrix and back, and how two poses compose into a wrapped delta.
"""

import numpy as np

from geomcd.pose import (
    AngleAxis,
    decode_angle,
    encode_angle,
    percentage_error,
    pose_delta,
    pose_to_rotation,
    rotation_to_pose,
)
from geomcd.types import Pose, apply_delta

angle = 137.2
code = encode_angle(angle, 24, AngleAxis.AZIMUTH)
print(f"azimuth {angle} deg -> bin {code.l}/24, offset {code.delta:+.4f}")
print(f"decoded back: {decode_angle(code):.10f} deg")

p = Pose(azimuth=123.4, elevation=31.0, inplane=-77.0)
R = pose_to_rotation(p)
q = rotation_to_pose(R)
print(f"\npose {p}")
print(f"rotation matrix determinant {np.linalg.det(R):.12f}")
print(f"recovered {q}")

before = Pose(azimuth=350.0, elevation=10.0, inplane=0.0)
after = Pose(azimuth=10.0, elevation=10.0, inplane=30.0)
d = pose_delta(before, after)
print(f"\ndelta from {before.azimuth} to {after.azimuth} deg azimuth "
      f"takes the short arc: {d.d_azimuth:+.1f} deg")
print(f"applying the delta lands on {apply_delta(before, d)}")

print(f"\na 90 deg rotation predicted as 81 deg is "
      f"{percentage_error(90.0, 81.0):.1f}% off")
