import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomcd.errors import MalformedObj, MalformedStl, NotARotation
from geomcd.mesh import TriangleMesh, parse_obj, parse_stl, transform_mesh, write_obj
from geomcd.pose import pose_to_rotation
from geomcd.types import normalize_pose

CUBE_FACES = np.array([
    [0, 2, 1], [0, 3, 2],  # z = 0
    [4, 5, 6], [4, 6, 7],  # z = 1
    [0, 1, 5], [0, 5, 4],
    [1, 2, 6], [1, 6, 5],
    [2, 3, 7], [2, 7, 6],
    [3, 0, 4], [3, 4, 7],
])


def cube_mesh():
    verts = np.array([
        [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
        [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
    ], dtype=float)
    return TriangleMesh(vertices=verts, faces=CUBE_FACES)


def binary_stl(mesh: TriangleMesh) -> bytes:
    body = b""
    for face in mesh.faces:
        tri = mesh.vertices[face]
        body += struct.pack("<12fH", 0, 0, 0, *tri.flatten(), 0)
    return b"\x00" * 80 + struct.pack("<I", len(mesh.faces)) + body


def ascii_stl(mesh: TriangleMesh) -> bytes:
    lines = ["solid cube"]
    for face in mesh.faces:
        lines.append("facet normal 0 0 0")
        lines.append("outer loop")
        for v in mesh.vertices[face]:
            lines.append(f"vertex {v[0]} {v[1]} {v[2]}")
        lines.append("endloop")
        lines.append("endfacet")
    lines.append("endsolid cube")
    return "\n".join(lines).encode("ascii")


class TestStl:
    def test_single_triangle(self):
        tri = TriangleMesh(
            vertices=np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float),
            faces=np.array([[0, 1, 2]]),
        )
        m = parse_stl(binary_stl(tri))
        assert len(m.vertices) == 3 and len(m.faces) == 1

    def test_cube_dedup(self):
        m = parse_stl(binary_stl(cube_mesh()))
        assert len(m.vertices) == 8
        assert len(m.faces) == 12

    def test_ascii_cube(self):
        m = parse_stl(ascii_stl(cube_mesh()))
        assert len(m.vertices) == 8 and len(m.faces) == 12
        assert m.name == "cube"

    def test_truncated_binary(self):
        data = binary_stl(cube_mesh())
        with pytest.raises(MalformedStl):
            parse_stl(data[:-10])

    def test_bad_ascii_keyword(self):
        with pytest.raises(MalformedStl):
            parse_stl(b"solid x\nfacet normal 0 0 0\nouter lop\n")

    def test_dedup_preserves_geometry(self):
        original = cube_mesh()
        m = parse_stl(binary_stl(original))
        # Same triangle soup regardless of vertex ordering
        soup = lambda mm: sorted(tuple(sorted(map(tuple, mm.vertices[f]))) for f in mm.faces)
        assert soup(m) == soup(original)


class TestObj:
    def test_minimal(self):
        m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        assert len(m.vertices) == 3 and len(m.faces) == 1

    def test_quad_fan(self):
        m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        assert m.faces.tolist() == [[0, 1, 2], [0, 2, 3]]

    def test_negative_and_suffixed_indices(self):
        m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3/1/1 -2/2/2 -1/3/3\n")
        assert m.faces.tolist() == [[0, 1, 2]]

    def test_bad_index(self):
        with pytest.raises(MalformedObj):
            parse_obj("v 0 0 0\nf 1 2 3\n")

    def test_non_numeric(self):
        with pytest.raises(MalformedObj):
            parse_obj("v 0 zero 0\n")

    def test_round_trip_cube(self):
        m = cube_mesh()
        m2 = parse_obj(write_obj(m))
        assert np.array_equal(m.vertices, m2.vertices)
        assert np.array_equal(m.faces, m2.faces)

    @settings(max_examples=50)
    @given(st.lists(st.floats(-100, 100), min_size=9, max_size=9))
    def test_round_trip_random_triangle(self, coords):
        # 9 significant decimal digits limit what survives; round first.
        coords = [float(f"{c:.9g}") for c in coords]
        m = TriangleMesh(
            vertices=np.array(coords).reshape(3, 3), faces=np.array([[0, 1, 2]])
        )
        m2 = parse_obj(write_obj(m))
        assert np.array_equal(m.vertices, m2.vertices)


class TestTransform:
    def test_identity(self):
        m = cube_mesh()
        t = transform_mesh(m, np.eye(3))
        assert np.allclose(t.vertices, m.vertices)

    def test_rz90_about_origin(self):
        m = TriangleMesh(
            vertices=np.array([[1, 0, 0], [0, 0, 0], [0, 0, 1]], dtype=float),
            faces=np.array([[0, 1, 2]]),
        )
        Rz90 = pose_to_rotation(normalize_pose(-90, 0, 0))  # Rz(+90)
        t = transform_mesh(m, Rz90, pivot=np.zeros(3))
        assert np.allclose(t.vertices[0], [0, 1, 0], atol=1e-12)

    def test_not_a_rotation(self):
        with pytest.raises(NotARotation):
            transform_mesh(cube_mesh(), np.diag([2.0, 1.0, 1.0]))

    @settings(max_examples=100)
    @given(
        az=st.floats(0, 360, exclude_max=True),
        el=st.floats(-90, 90),
        ip=st.floats(-180, 180, exclude_max=True),
    )
    def test_rigid_motion(self, az, el, ip):
        m = cube_mesh()
        R = pose_to_rotation(normalize_pose(az, el, ip))
        t = transform_mesh(m, R)
        d0 = np.linalg.norm(m.vertices[:, None] - m.vertices[None, :], axis=-1)
        d1 = np.linalg.norm(t.vertices[:, None] - t.vertices[None, :], axis=-1)
        assert np.abs(d0 - d1).max() <= 1e-9
        areas = lambda mm: np.array([
            0.5 * np.linalg.norm(np.cross(mm.vertices[f[1]] - mm.vertices[f[0]],
                                          mm.vertices[f[2]] - mm.vertices[f[0]]))
            for f in mm.faces
        ])
        assert np.abs(areas(m) - areas(t)).max() <= 1e-9
