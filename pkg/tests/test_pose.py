import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomcd.errors import ElevationOutOfRange, InvalidBin, NotARotation, ZeroRealDelta
from geomcd.pose import (
    AngleAxis,
    AngleBinCode,
    decode_angle,
    encode_angle,
    is_rotation,
    percentage_error,
    pose_delta,
    pose_to_rotation,
    rotation_to_pose,
)
from geomcd.types import Pose, apply_delta, normalize_pose

angles = {
    AngleAxis.AZIMUTH: st.floats(0, 360, exclude_max=True, allow_nan=False),
    AngleAxis.ELEVATION: st.floats(-90, 90),
    AngleAxis.INPLANE: st.floats(-180, 180, exclude_max=True, allow_nan=False),
}


class TestCodec:
    def test_first_bin_center(self):
        assert decode_angle(AngleBinCode(0, 24, 0.0, AngleAxis.AZIMUTH)) == 7.5

    def test_offset_reaches_bin_edge(self):
        assert decode_angle(AngleBinCode(0, 24, 1.0, AngleAxis.AZIMUTH)) == 15.0

    def test_elevation_decode(self):
        # center = -90 + 6.5*15 = 7.5; 7.5 - 0.5*7.5 = 3.75
        assert decode_angle(AngleBinCode(6, 12, -0.5, AngleAxis.ELEVATION)) == 3.75

    def test_encode_exact_center(self):
        code = encode_angle(7.5, 24, AngleAxis.AZIMUTH)
        assert (code.l, code.delta) == (0, 0.0)

    def test_encode_near_wrap(self):
        code = encode_angle(359.999, 24, AngleAxis.AZIMUTH)
        assert code.l == 23
        assert code.delta == pytest.approx(0.99987, abs=1e-4)
        assert decode_angle(code) == pytest.approx(359.999, abs=1e-9)

    def test_inplane_lower_edge(self):
        code = encode_angle(-180.0, 12, AngleAxis.INPLANE)
        assert (code.l, code.delta) == (0, -1.0)

    def test_invalid_bin(self):
        with pytest.raises(InvalidBin):
            AngleBinCode(5, 4, 0.0, AngleAxis.AZIMUTH)
        with pytest.raises(InvalidBin):
            AngleBinCode(0, 4, 1.5, AngleAxis.AZIMUTH)

    def test_elevation_out_of_range(self):
        with pytest.raises(ElevationOutOfRange):
            encode_angle(95.0, 12, AngleAxis.ELEVATION)

    @settings(max_examples=300)
    @given(
        axis=st.sampled_from(list(AngleAxis)),
        L=st.integers(4, 360),
        data=st.data(),
    )
    def test_round_trip(self, axis, L, data):
        angle = data.draw(angles[axis])
        assert decode_angle(encode_angle(angle, L, axis)) == pytest.approx(angle, abs=1e-9)


poses = st.builds(
    normalize_pose,
    st.floats(0, 360, exclude_max=True),
    st.floats(-89.9, 89.9),
    st.floats(-180, 180, exclude_max=True),
)


class TestRotation:
    def test_identity(self):
        assert np.allclose(pose_to_rotation(Pose(0, 0, 0)), np.eye(3))
        assert rotation_to_pose(np.eye(3)) == Pose(0, 0, 0)

    def test_azimuth_90_moves_x_axis(self):
        R = pose_to_rotation(Pose(90, 0, 0))
        assert np.allclose(R @ [1, 0, 0], [0, -1, 0], atol=1e-12)

    def test_not_a_rotation(self):
        with pytest.raises(NotARotation):
            rotation_to_pose(np.diag([1.0, 1.0, 2.0]))

    def test_elevation_90_recovers_uniquely(self):
        # Z-X-Z is non-degenerate at elevation 90; the split survives.
        R = pose_to_rotation(Pose(25, 90, 40))
        p = rotation_to_pose(R)
        assert p.elevation == pytest.approx(90.0, abs=1e-9)
        assert p.azimuth == pytest.approx(25.0, abs=1e-8)
        assert p.inplane == pytest.approx(40.0, abs=1e-8)
        assert np.allclose(pose_to_rotation(p), R, atol=1e-9)

    def test_elevation_zero_degenerate_convention(self):
        # At elevation 0 only inplane - azimuth is observable; azimuth := 0.
        R = pose_to_rotation(Pose(25, 0, 40))
        p = rotation_to_pose(R)
        assert p.azimuth == 0.0
        assert p.elevation == 0.0
        assert p.inplane == pytest.approx(15.0, abs=1e-9)
        assert np.allclose(pose_to_rotation(p), R, atol=1e-9)

    def test_documented_round_trip_example(self):
        p = Pose(123.4, 31.0, -77.0)
        q = rotation_to_pose(pose_to_rotation(p))
        assert q.azimuth == pytest.approx(123.4, abs=1e-8)
        assert q.elevation == pytest.approx(31.0, abs=1e-8)
        assert q.inplane == pytest.approx(-77.0, abs=1e-8)

    @settings(max_examples=300)
    @given(p=poses)
    def test_matrix_round_trip(self, p):
        R = pose_to_rotation(p)
        assert is_rotation(R, tol=1e-9)
        q = rotation_to_pose(R)
        assert np.abs(pose_to_rotation(q) - R).max() <= 1e-8

    @settings(max_examples=200)
    @given(p1=poses, p2=poses)
    def test_group_closure(self, p1, p2):
        R = pose_to_rotation(p1) @ pose_to_rotation(p2)
        assert is_rotation(R, tol=1e-9)


class TestDelta:
    def test_identity(self):
        p = Pose(10, 20, 30)
        d = pose_delta(p, p)
        assert (d.d_azimuth, d.d_elevation, d.d_inplane) == (0, 0, 0)

    def test_shortest_arc(self):
        d = pose_delta(Pose(350, 0, 0), Pose(10, 0, 0))
        assert d.d_azimuth == 20.0

    def test_elevation_linear(self):
        d = pose_delta(Pose(0, 30, 0), Pose(0, -10, 0))
        assert d.d_elevation == -40.0

    @settings(max_examples=200)
    @given(p1=poses, p2=poses)
    def test_delta_consistency(self, p1, p2):
        from geomcd.types import wrap_delta

        q = apply_delta(p1, pose_delta(p1, p2))
        # Circular comparison: a wrap boundary can map 0 to 360 - epsilon.
        assert abs(wrap_delta(q.azimuth - p2.azimuth)) <= 1e-9
        assert q.elevation == pytest.approx(p2.elevation, abs=1e-9)
        assert abs(wrap_delta(q.inplane - p2.inplane)) <= 1e-9


class TestPercentageError:
    def test_basic(self):
        assert percentage_error(90, 81) == 10.0
        assert percentage_error(90, 90) == 0.0

    def test_zero_real(self):
        with pytest.raises(ZeroRealDelta):
            percentage_error(0, 5)

    def test_negative_real_is_positive_error(self):
        assert percentage_error(-90, -81) == 10.0

    @given(
        real=st.floats(-180, 180).filter(lambda x: abs(x) > 1e-6),
        pred=st.floats(-180, 180),
        k=st.floats(-10, 10).filter(lambda x: abs(x) > 1e-6),
    )
    def test_scale_consistency(self, real, pred, k):
        assert percentage_error(k * real, k * pred) == pytest.approx(
            percentage_error(real, pred), rel=1e-9, abs=1e-9
        )
