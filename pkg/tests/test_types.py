import numpy as np
import pytest
from hypothesis import given, strategies as st

from geomcd.errors import ElevationOutOfRange
from geomcd.types import (
    BoundingBox,
    Detection,
    GrayFrame,
    Pose,
    PoseDelta,
    apply_delta,
    iou,
    normalize_pose,
)


class TestNormalizePose:
    def test_wraparound_boundary(self):
        p = normalize_pose(360, 0, 180)
        assert (p.azimuth, p.elevation, p.inplane) == (0.0, 0.0, -180.0)

    def test_negative_azimuth(self):
        p = normalize_pose(-10, 45, 0)
        assert (p.azimuth, p.elevation, p.inplane) == (350.0, 45.0, 0.0)

    def test_elevation_rejected(self):
        with pytest.raises(ElevationOutOfRange):
            normalize_pose(0, 95, 0)

    def test_idempotent(self):
        p = normalize_pose(123.4, -56.0, 170.0)
        q = normalize_pose(p.azimuth, p.elevation, p.inplane)
        assert p == q

    @given(
        az=st.floats(-720, 720, allow_nan=False),
        el=st.floats(-90, 90),
        ip=st.floats(-720, 720, allow_nan=False),
        k=st.integers(-3, 3),
    )
    def test_periodicity(self, az, el, ip, k):
        p = normalize_pose(az, el, ip)
        q = normalize_pose(p.azimuth + 360 * k, p.elevation, p.inplane + 360 * k)
        assert q.azimuth == pytest.approx(p.azimuth, abs=1e-9) or abs(q.azimuth - p.azimuth) == pytest.approx(360, abs=1e-9)
        assert q.elevation == p.elevation
        assert q.inplane == pytest.approx(p.inplane, abs=1e-9) or abs(q.inplane - p.inplane) == pytest.approx(360, abs=1e-9)


class TestFrame:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            GrayFrame(width=3, height=2, pixels=np.zeros((3, 3)))

    def test_range_checked(self):
        with pytest.raises(ValueError):
            GrayFrame.from_array(np.full((2, 2), 1.5))

    def test_immutable(self):
        f = GrayFrame.from_array(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            f.pixels[0, 0] = 1.0

    def test_flatten_row_major(self):
        f = GrayFrame.from_array(np.array([[0.0, 0.25], [0.5, 0.75]]))
        assert f.flatten().tolist() == [0.0, 0.25, 0.5, 0.75]


class TestBoxes:
    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            BoundingBox(5, 5, 5, 9)

    def test_iou_identity_and_bounds(self):
        a = BoundingBox(0, 0, 4, 4)
        b = BoundingBox(2, 2, 6, 6)
        assert iou(a, a) == 1.0
        assert iou(a, b) == iou(b, a)
        assert 0.0 < iou(a, b) < 1.0
        assert iou(a, BoundingBox(10, 10, 12, 12)) == 0.0

    def test_detection_validation(self):
        box = BoundingBox(0, 0, 1, 1)
        with pytest.raises(ValueError):
            Detection(class_label="", bbox=box, confidence=0.5)
        with pytest.raises(ValueError):
            Detection(class_label="x", bbox=box, confidence=1.5)


class TestDelta:
    def test_translation_reserved(self):
        with pytest.raises(ValueError):
            PoseDelta(0, 0, 0, d_translation=(1.0, 0.0, 0.0))

    def test_apply_wraps(self):
        p = Pose(azimuth=350.0, elevation=0.0, inplane=0.0)
        q = apply_delta(p, PoseDelta(d_azimuth=20.0, d_elevation=0.0, d_inplane=0.0))
        assert q.azimuth == 10.0
