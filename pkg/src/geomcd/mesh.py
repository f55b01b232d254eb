"""Minimal triangle-mesh I/O: binary/ASCII STL parsing, OBJ read/write, rigid transforms."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import MalformedObj, MalformedStl, NotARotation
from .pose import is_rotation

STL_RECORD = struct.Struct("<12fH")  # normal, 3 vertices, attribute byte count


@dataclass(frozen=True)
class TriangleMesh:
    """Vertices and vertex-index triangles. Stored normals are not kept."""

    vertices: np.ndarray  # (nv, 3) float64
    faces: np.ndarray     # (nf, 3) int64
    name: str = ""

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3))
        f = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64).reshape(-1, 3))
        if f.size:
            if f.min() < 0 or f.max() >= len(v):
                raise ValueError("face index out of range")
            if any(len(set(face)) != 3 for face in f.tolist()):
                raise ValueError("degenerate face with repeated vertex index")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    def bbox_center(self) -> np.ndarray:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return (lo + hi) / 2.0


def _dedup_triangles(triangles: list[np.ndarray], name: str) -> TriangleMesh:
    vert_index: dict[tuple, int] = {}
    vertices: list[tuple] = []
    faces = []
    for tri in triangles:
        idx = []
        for v in tri:
            key = (float(v[0]), float(v[1]), float(v[2]))
            if key not in vert_index:
                vert_index[key] = len(vertices)
                vertices.append(key)
            idx.append(vert_index[key])
        faces.append(idx)
    return TriangleMesh(
        vertices=np.array(vertices, dtype=np.float64).reshape(-1, 3),
        faces=np.array(faces, dtype=np.int64).reshape(-1, 3),
        name=name,
    )


def parse_stl(data: bytes) -> TriangleMesh:
    """Parse binary or ASCII STL bytes; vertices deduplicated by exact coordinates."""
    if _looks_ascii(data):
        return _parse_stl_ascii(data)
    return _parse_stl_binary(data)


def _looks_ascii(data: bytes) -> bool:
    head = data.lstrip()[:6].lower()
    if not head.startswith(b"solid"):
        return False
    # Binary files may still start with "solid"; an ASCII body must mention facets
    # or be an empty solid.
    return b"facet" in data[:500].lower() or b"endsolid" in data.lower()


def _parse_stl_binary(data: bytes) -> TriangleMesh:
    if len(data) < 84:
        raise MalformedStl("binary STL shorter than header + count")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) < expected:
        raise MalformedStl(f"binary STL truncated: need {expected} bytes, have {len(data)}")
    triangles = []
    for i in range(count):
        rec = STL_RECORD.unpack_from(data, 84 + 50 * i)
        tri = np.array(rec[3:12], dtype=np.float64).reshape(3, 3)
        triangles.append(tri)
    return _dedup_triangles(triangles, name="")


def _parse_stl_ascii(data: bytes) -> TriangleMesh:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise MalformedStl("ASCII STL with non-ASCII bytes") from e
    tokens = text.split()
    name = ""
    triangles: list[np.ndarray] = []
    i = 0
    if tokens[0].lower() != "solid":
        raise MalformedStl("ASCII STL must start with 'solid'")
    i = 1
    if i < len(tokens) and tokens[i].lower() not in ("facet", "endsolid"):
        name = tokens[i]
        i += 1
    while i < len(tokens):
        kw = tokens[i].lower()
        if kw == "endsolid":
            return _dedup_triangles(triangles, name=name)
        if kw != "facet":
            raise MalformedStl(f"unexpected keyword {tokens[i]!r}")
        try:
            # facet normal nx ny nz / outer loop / 3x(vertex x y z) / endloop / endfacet
            if tokens[i + 1].lower() != "normal":
                raise MalformedStl("expected 'normal'")
            j = i + 5
            if tokens[j].lower() != "outer" or tokens[j + 1].lower() != "loop":
                raise MalformedStl("expected 'outer loop'")
            j += 2
            tri = np.empty((3, 3))
            for k in range(3):
                if tokens[j].lower() != "vertex":
                    raise MalformedStl("expected 'vertex'")
                tri[k] = [float(tokens[j + 1]), float(tokens[j + 2]), float(tokens[j + 3])]
                j += 4
            if tokens[j].lower() != "endloop" or tokens[j + 1].lower() != "endfacet":
                raise MalformedStl("expected 'endloop endfacet'")
            i = j + 2
            triangles.append(tri)
        except (IndexError, ValueError) as e:
            raise MalformedStl(f"malformed facet near token {i}") from e
    raise MalformedStl("missing 'endsolid'")


def parse_obj(text: str) -> TriangleMesh:
    """Parse the v/f subset of OBJ; polygons fan-triangulated, vt/vn suffixes ignored."""
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    name = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "v":
            if len(parts) < 4:
                raise MalformedObj(f"line {lineno}: vertex needs 3 coordinates")
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as e:
                raise MalformedObj(f"line {lineno}: non-numeric coordinate") from e
        elif kw == "f":
            if len(parts) < 4:
                raise MalformedObj(f"line {lineno}: face needs at least 3 vertices")
            idx = []
            for token in parts[1:]:
                head = token.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError as e:
                    raise MalformedObj(f"line {lineno}: bad face index {token!r}") from e
                if i == 0:
                    raise MalformedObj(f"line {lineno}: OBJ indices are 1-based, got 0")
                if i < 0:
                    i = len(vertices) + i
                else:
                    i = i - 1
                if not 0 <= i < len(vertices):
                    raise MalformedObj(f"line {lineno}: face index {token!r} out of range")
                idx.append(i)
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
        elif kw in ("o", "g"):
            if len(parts) > 1:
                name = parts[1]
        # vn, vt, mtllib, usemtl, s: parsed and ignored
    return TriangleMesh(
        vertices=np.array(vertices, dtype=np.float64).reshape(-1, 3),
        faces=np.array(faces, dtype=np.int64).reshape(-1, 3),
        name=name,
    )


def write_obj(mesh: TriangleMesh) -> str:
    """Emit v then f lines, 1-based, 9 significant digits; round-trips exactly
    for coordinates representable at that precision."""
    lines = []
    if mesh.name:
        lines.append(f"o {mesh.name}")
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
    for f in mesh.faces:
        lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    return "\n".join(lines) + "\n"


def transform_mesh(
    mesh: TriangleMesh, R: np.ndarray, pivot: np.ndarray | None = None
) -> TriangleMesh:
    """Rotate every vertex about a pivot (default: bounding-box center)."""
    R = np.asarray(R, dtype=float)
    if not is_rotation(R):
        raise NotARotation("transform requires a proper rotation matrix")
    pivot = mesh.bbox_center() if pivot is None else np.asarray(pivot, dtype=float)
    verts = (mesh.vertices - pivot) @ R.T + pivot
    return TriangleMesh(vertices=verts, faces=mesh.faces, name=mesh.name)
