"""Binary STL read/write and minimal OBJ import."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .mesh import TriangleMesh, _face_cross

HEADER = b"fptarget binary STL"

_RECORD = np.dtype(
    [("normal", "<f4", (3,)), ("corners", "<f4", (3, 3)), ("attr", "<u2")]
)
assert _RECORD.itemsize == 50


def stl_bytes(mesh: TriangleMesh) -> bytes:
    """Serialise to binary STL: 80-byte header, uint32 count, 50-byte records."""
    records = np.zeros(mesh.n_faces, dtype=_RECORD)
    if mesh.n_faces:
        c = _face_cross(mesh)
        length = np.linalg.norm(c, axis=1)
        n = np.divide(c, length[:, None], out=np.zeros_like(c), where=length[:, None] > 0)
        records["normal"] = n
        records["corners"] = mesh.triangles()
    header = HEADER.ljust(80, b"\0")
    return header + struct.pack("<I", mesh.n_faces) + records.tobytes()


def write_stl(mesh: TriangleMesh, path) -> Path:
    path = Path(path)
    path.write_bytes(stl_bytes(mesh))
    return path


def parse_stl(data: bytes) -> TriangleMesh:
    """Parse binary STL bytes, welding corners with identical coordinates."""
    if len(data) < 84:
        raise FormatError(f"truncated STL header: {len(data)} bytes", offset=len(data))
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) < expected:
        whole = (len(data) - 84) // 50
        raise FormatError(
            f"STL declares {count} triangles but holds only {whole} complete records",
            offset=84 + 50 * whole,
        )
    if len(data) > expected:
        raise FormatError(f"STL declares {count} triangles but has {len(data) - expected} trailing bytes", offset=expected)
    records = np.frombuffer(data, dtype=_RECORD, count=count, offset=84)
    corners = records["corners"].astype(np.float64).reshape(-1, 3)
    if not len(corners):
        return TriangleMesh.empty()
    uniq, first, inverse = np.unique(corners, axis=0, return_index=True, return_inverse=True)
    # renumber in first-appearance order so reads are stable and readable
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return TriangleMesh(uniq[order], rank[inverse.ravel()].reshape(-1, 3))


def read_stl(path) -> TriangleMesh:
    return parse_stl(Path(path).read_bytes())


def read_obj(path) -> TriangleMesh:
    """Read ``v`` and ``f`` records; polygons are fan-triangulated."""
    verts, faces = [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            try:
                verts.append([float(t) for t in parts[1:4]])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad vertex record") from exc
        elif parts[0] == "f":
            try:
                idx = [int(t.split("/")[0]) for t in parts[1:]]
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad face record") from exc
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            if len(idx) < 3:
                raise FormatError(f"line {lineno}: face with fewer than 3 vertices")
            for k in range(1, len(idx) - 1):
                faces.append((idx[0], idx[k], idx[k + 1]))
    return TriangleMesh(np.asarray(verts, dtype=np.float64).reshape(-1, 3), np.asarray(faces, dtype=np.int64).reshape(-1, 3))


def read_mesh(path) -> TriangleMesh:
    path = Path(path)
    if path.suffix.lower() == ".obj":
        return read_obj(path)
    return read_stl(path)
