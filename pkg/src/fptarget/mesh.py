"""Indexed triangle meshes and the topology operations the mold and scaffold
builders are made of.

Faces are ordered vertex triples; the winding encodes the face normal as
``(v1 - v0) x (v2 - v1)``.  All operations return new meshes and never
modify their inputs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFaceError, GeometryError, MeshError, NonManifoldEdgeError

AREA_EPS = 1e-9  # mm^2, degenerate-face threshold
PLANE_EPS = 1e-9  # mm, "on the plane"
COINCIDENT_EPS = 1e-6  # mm

BoundaryLoop = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Vertices in millimetres and faces as rows of vertex indices."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64).reshape(-1, 3)
        f = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        if f.size:
            if f.min() < 0 or f.max() >= len(v):
                raise MeshError(f"face index out of range for {len(v)} vertices")
            repeated = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
            if repeated.any():
                bad = int(np.flatnonzero(repeated)[0])
                raise DegenerateFaceError(bad, f"face {bad} references a vertex twice: {f[bad].tolist()}")
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinate")
        v.flags.writeable = False
        f.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @classmethod
    def empty(cls) -> "TriangleMesh":
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def triangles(self) -> np.ndarray:
        """Corner coordinates, shape (n_faces, 3, 3)."""
        return self.vertices[self.faces]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.n_vertices:
            return np.zeros(3), np.zeros(3)
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __repr__(self):
        return f"TriangleMesh(n_vertices={self.n_vertices}, n_faces={self.n_faces})"


@dataclass(frozen=True)
class Plane:
    """Points ``p`` with ``normal . p == offset``."""

    normal: tuple[float, float, float]
    offset: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        length = np.linalg.norm(n)
        if length == 0:
            raise ValueError("plane normal must be non-zero")
        if abs(length - 1.0) > 1e-9:
            n = n / length
        object.__setattr__(self, "normal", tuple(float(c) for c in n))

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ np.asarray(self.normal) - self.offset

    def project(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        n = np.asarray(self.normal)
        return points - np.multiply.outer(self.signed_distance(points), n)


@dataclass
class ValidationReport:
    watertight: bool
    edge_manifold: bool
    consistently_oriented: bool
    signed_volume: float
    bbox_min: tuple[float, float, float]
    bbox_max: tuple[float, float, float]
    degenerate_faces: int
    boundary_loops: list[BoundaryLoop] = field(default_factory=list)
    n_vertices: int = 0
    n_faces: int = 0

    @property
    def outward(self) -> bool:
        return self.signed_volume > 0

    @property
    def ok(self) -> bool:
        """Printable: closed, manifold, consistent, outward, no slivers."""
        return (
            self.watertight
            and self.edge_manifold
            and self.consistently_oriented
            and self.outward
            and self.degenerate_faces == 0
        )

    def lines(self) -> list[str]:
        lo, hi = self.bbox_min, self.bbox_max
        return [
            f"vertices            {self.n_vertices}",
            f"faces               {self.n_faces}",
            f"watertight          {self.watertight}",
            f"edge_manifold       {self.edge_manifold}",
            f"consistent_winding  {self.consistently_oriented}",
            f"signed_volume_mm3   {self.signed_volume:.6f}",
            f"orientation         {'outward' if self.outward else 'inward'}",
            f"degenerate_faces    {self.degenerate_faces}",
            f"boundary_loops      {len(self.boundary_loops)}",
            "bbox_min_mm         " + " ".join(f"{c:.6f}" for c in lo),
            "bbox_max_mm         " + " ".join(f"{c:.6f}" for c in hi),
        ]


# --- per-face and per-vertex geometry -------------------------------------


def _face_cross(mesh: TriangleMesh) -> np.ndarray:
    t = mesh.triangles()
    return np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 1])


def face_areas(mesh: TriangleMesh) -> np.ndarray:
    return 0.5 * np.linalg.norm(_face_cross(mesh), axis=1)


def face_normal(mesh: TriangleMesh, face_index: int) -> np.ndarray:
    """Unit normal ``a x b`` with ``a = v1 - v0`` and ``b = v2 - v1``."""
    if not 0 <= face_index < mesh.n_faces:
        raise IndexError(f"face index {face_index} out of range ({mesh.n_faces} faces)")
    p0, p1, p2 = mesh.vertices[mesh.faces[face_index]]
    c = np.cross(p1 - p0, p2 - p1)
    length = np.linalg.norm(c)
    if 0.5 * length <= AREA_EPS:
        raise DegenerateFaceError(face_index)
    return c / length


def face_normals(mesh: TriangleMesh) -> np.ndarray:
    c = _face_cross(mesh)
    length = np.linalg.norm(c, axis=1)
    bad = np.flatnonzero(0.5 * length <= AREA_EPS)
    if bad.size:
        raise DegenerateFaceError(int(bad[0]))
    return c / length[:, None]


def vertex_normals(mesh: TriangleMesh) -> np.ndarray:
    """Area-weighted average of incident face normals, normalised."""
    acc = np.zeros_like(mesh.vertices)
    c = _face_cross(mesh)  # length is twice the area: the weighting comes free
    for corner in range(3):
        np.add.at(acc, mesh.faces[:, corner], c)
    length = np.linalg.norm(acc, axis=1)
    used = np.zeros(mesh.n_vertices, dtype=bool)
    used[mesh.faces.ravel()] = True
    if not used.all():
        isolated = np.flatnonzero(~used)
        raise MeshError(f"isolated vertices without incident faces: {isolated[:20].tolist()}")
    zero = length == 0
    if zero.any():
        raise MeshError(f"vertex normals cancel at vertices {np.flatnonzero(zero)[:20].tolist()}")
    return acc / length[:, None]


def surface_area(mesh: TriangleMesh) -> float:
    return float(face_areas(mesh).sum())


def signed_volume(mesh: TriangleMesh) -> float:
    """Sum of signed tetrahedron volumes against the origin."""
    if not mesh.n_faces:
        return 0.0
    t = mesh.triangles()
    return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)


# --- orientation and transforms --------------------------------------------


def invert_faces(mesh: TriangleMesh) -> TriangleMesh:
    """Reverse every face: ``[i, j, k] -> [k, j, i]``."""
    return TriangleMesh(mesh.vertices, mesh.faces[:, ::-1])


def apply_affine(mesh: TriangleMesh, transform) -> TriangleMesh:
    """Map vertices through a 3x4 (or 4x4) affine matrix.

    Reflections flip the winding sense, so faces are reversed when the linear
    part has a negative determinant to keep the surface facing outward.
    """
    m = np.asarray(transform, dtype=np.float64)
    if m.shape == (4, 4):
        m = m[:3]
    if m.shape != (3, 4):
        raise ValueError(f"affine transform must be 3x4, got {m.shape}")
    linear, shift = m[:, :3], m[:, 3]
    det = np.linalg.det(linear)
    if abs(det) < 1e-12:
        raise MeshError("affine transform has a singular linear part")
    out = TriangleMesh(mesh.vertices @ linear.T + shift, mesh.faces)
    return invert_faces(out) if det < 0 else out


def translation(dx: float, dy: float, dz: float) -> np.ndarray:
    m = np.zeros((3, 4))
    m[:, :3] = np.eye(3)
    m[:, 3] = (dx, dy, dz)
    return m


def scaling(sx: float, sy: float, sz: float) -> np.ndarray:
    m = np.zeros((3, 4))
    m[:, :3] = np.diag((sx, sy, sz))
    return m


def merge(*meshes: TriangleMesh) -> TriangleMesh:
    """Concatenate meshes into one (disjoint components stay disjoint)."""
    verts, faces, base = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + base)
        base += m.n_vertices
    if not verts:
        return TriangleMesh.empty()
    return TriangleMesh(np.concatenate(verts), np.concatenate(faces))


def compact(vertices: np.ndarray, faces: np.ndarray) -> TriangleMesh:
    """Drop unreferenced vertices, keeping the original vertex order."""
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if not len(faces):
        return TriangleMesh.empty()
    used = np.unique(faces)
    remap = np.full(len(vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return TriangleMesh(np.asarray(vertices)[used], remap[faces])


# --- splitting --------------------------------------------------------------


def split_by_plane(mesh: TriangleMesh, plane: Plane) -> tuple[TriangleMesh, TriangleMesh]:
    """Cut a mesh into the parts on the positive and negative side of a plane.

    Faces straddling the plane are subdivided at the exact edge/plane
    intersections; intersection vertices are shared between neighbouring
    faces so each side stays connected.  Vertices within ``PLANE_EPS`` of the
    plane count as on it and end up in both halves.
    """
    if not mesh.n_faces:
        return TriangleMesh.empty(), TriangleMesh.empty()

    d = plane.signed_distance(mesh.vertices)
    side = np.where(d > PLANE_EPS, 1, np.where(d < -PLANE_EPS, -1, 0))
    fs = side[mesh.faces]
    has_pos = (fs > 0).any(axis=1)
    has_neg = (fs < 0).any(axis=1)
    crossing = has_pos & has_neg

    above = [mesh.faces[~has_neg & ~crossing]]
    below = [mesh.faces[has_neg & ~has_pos]]

    vertices = list(mesh.vertices)
    cut_cache: dict[tuple[int, int], int] = {}
    normal = np.asarray(plane.normal)

    def cut(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in cut_cache:
            pa, pb = mesh.vertices[key[0]], mesh.vertices[key[1]]
            da, db = d[key[0]], d[key[1]]
            p = pa + (da / (da - db)) * (pb - pa)
            p = p - (p @ normal - plane.offset) * normal
            cut_cache[key] = len(vertices)
            vertices.append(p)
        return cut_cache[key]

    extra_above, extra_below = [], []
    for face in mesh.faces[crossing]:
        s = side[face]
        poly_pos, poly_neg = [], []
        for k in range(3):
            a, b = int(face[k]), int(face[(k + 1) % 3])
            if s[k] >= 0:
                poly_pos.append(a)
            if s[k] <= 0:
                poly_neg.append(a)
            if s[k] * s[(k + 1) % 3] < 0:
                c = cut(a, b)
                poly_pos.append(c)
                poly_neg.append(c)
        for poly, sink in ((poly_pos, extra_above), (poly_neg, extra_below)):
            for k in range(1, len(poly) - 1):
                sink.append((poly[0], poly[k], poly[k + 1]))

    vertices = np.asarray(vertices)
    if extra_above:
        above.append(np.asarray(extra_above, dtype=np.int64))
    if extra_below:
        below.append(np.asarray(extra_below, dtype=np.int64))
    return compact(vertices, np.concatenate(above)), compact(vertices, np.concatenate(below))


# --- boundaries, stitching, capping ------------------------------------------


def _edge_counts(mesh: TriangleMesh):
    f = mesh.faces
    directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    undirected = np.sort(directed, axis=1)
    keys, counts = np.unique(undirected, axis=0, return_counts=True)
    return directed, keys, counts


def extract_boundary_loops(mesh: TriangleMesh) -> list[BoundaryLoop]:
    """Closed loops of edges used by exactly one face.

    Each loop follows the direction its edges have in their faces and starts
    at its smallest vertex index; loops are sorted by that index.
    """
    if not mesh.n_faces:
        return []
    directed, keys, counts = _edge_counts(mesh)
    over = np.flatnonzero(counts > 2)
    if over.size:
        a, b = keys[over[0]]
        raise NonManifoldEdgeError((int(a), int(b)), int(counts[over[0]]))
    single = {(int(a), int(b)) for (a, b), c in zip(keys, counts) if c == 1}
    if not single:
        return []

    nxt: dict[int, list[int]] = defaultdict(list)
    for a, b in directed.tolist():
        if ((a, b) if a < b else (b, a)) in single:
            nxt[a].append(b)
    for succ in nxt.values():
        succ.sort()

    loops = []
    remaining = sum(len(v) for v in nxt.values())
    while remaining:
        start = min(k for k, v in nxt.items() if v)
        loop = [start]
        cur = nxt[start].pop(0)
        remaining -= 1
        while cur != start:
            loop.append(cur)
            if not nxt[cur]:
                raise MeshError(f"boundary is not closed at vertex {cur}")
            cur = nxt[cur].pop(0)
            remaining -= 1
        loops.append(tuple(loop))
    loops.sort(key=min)
    return [_rotate_to_min(l) for l in loops]


def _rotate_to_min(loop: BoundaryLoop) -> BoundaryLoop:
    k = loop.index(min(loop))
    return loop[k:] + loop[:k]


def stitch_boundaries(loop_a: BoundaryLoop, loop_b: BoundaryLoop, mesh: TriangleMesh) -> TriangleMesh:
    """Close the gap between two boundary loops with a band of triangles.

    The band is a zipper: walking both loops in step, each new triangle
    advances whichever loop yields the shorter new cross edge (ties go to the
    lower vertex index).  A band over loops of n and m vertices has n + m
    triangles.  Both loops must bound a surface that the band closes
    consistently, i.e. they run in opposite senses as seen across the band.
    """
    if len(loop_a) < 3 or len(loop_b) < 3:
        raise MeshError("stitching needs loops of at least 3 vertices")
    shared = set(loop_a) & set(loop_b)
    if shared:
        raise MeshError(f"loops share vertices {sorted(shared)[:10]}")
    for idx in (*loop_a, *loop_b):
        if not 0 <= idx < mesh.n_vertices:
            raise MeshError(f"loop vertex {idx} not in mesh")

    v = mesh.vertices
    p = list(reversed(loop_a))
    q0 = list(loop_b)
    start = int(np.argmin(np.linalg.norm(v[q0] - v[p[0]], axis=1)))
    q = q0[start:] + q0[:start]
    n, m = len(p), len(q)

    band = []
    i = j = 0
    while i < n or j < m:
        pi, pn = p[i % n], p[(i + 1) % n]
        qj, qn = q[j % m], q[(j + 1) % m]
        if i == n:
            advance_p = False
        elif j == m:
            advance_p = True
        else:
            dp = np.linalg.norm(v[pn] - v[qj])
            dq = np.linalg.norm(v[pi] - v[qn])
            advance_p = dp < dq or (dp == dq and pn < qn)
        if advance_p:
            band.append((pi, pn, qj))
            i += 1
        else:
            band.append((pi, qn, qj))
            j += 1
    return TriangleMesh(v, np.concatenate([mesh.faces, np.asarray(band, dtype=np.int64)]))


def fan_cap(loop: BoundaryLoop, mesh: TriangleMesh) -> TriangleMesh:
    """Close a loop with triangles sharing a new vertex at the loop centroid."""
    if len(loop) < 3:
        raise MeshError(f"cannot cap a loop of {len(loop)} vertices")
    idx = np.asarray(loop, dtype=np.int64)
    centre = mesh.vertices[idx].mean(axis=0)
    c = mesh.n_vertices
    fan = np.column_stack([np.full(len(idx), c), np.roll(idx, -1), idx])
    return TriangleMesh(np.vstack([mesh.vertices, centre]), np.concatenate([mesh.faces, fan]))


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = np.asarray(normal, dtype=np.float64)
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(helper, n)
    u /= np.linalg.norm(u)
    return u, np.cross(n, u)


def triangulate_polygon(points2d: np.ndarray) -> list[tuple[int, int, int]]:
    """Ear-clipping triangulation of a simple polygon.

    Returns index triples wound in the same sense as the input polygon.
    Collinear vertices are never clipped as ears, so no zero-area triangles
    are produced.
    """
    pts = np.asarray(points2d, dtype=np.float64)
    n = len(pts)
    if n < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    x, y = pts[:, 0], pts[:, 1]
    area2 = float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    if area2 == 0:
        raise GeometryError("polygon has zero area")
    orient = 1.0 if area2 > 0 else -1.0
    scale = max(np.ptp(x), np.ptp(y))
    eps = 1e-12 * scale * scale

    def cross(a, b, c):
        return orient * ((pts[b, 0] - pts[a, 0]) * (pts[c, 1] - pts[b, 1]) - (pts[b, 1] - pts[a, 1]) * (pts[c, 0] - pts[b, 0]))

    ring = list(range(n))
    tris = []
    k = 0
    stall = 0
    while len(ring) > 3:
        m = len(ring)
        a, b, c = ring[(k - 1) % m], ring[k % m], ring[(k + 1) % m]
        if cross(a, b, c) > eps and _ear_is_empty(pts, ring, a, b, c, orient, eps):
            tris.append((a, b, c))
            del ring[k % m]
            k = (k - 1) % (m - 1)
            stall = 0
            continue
        k = (k + 1) % m
        stall += 1
        if stall > m:
            raise GeometryError(f"ear clipping stalled with {m} vertices left (self-intersecting polygon?)")
    a, b, c = ring
    if cross(a, b, c) <= eps:
        raise GeometryError("final ear is degenerate")
    tris.append((a, b, c))
    return tris


def _ear_is_empty(pts, ring, a, b, c, orient, eps) -> bool:
    others = np.asarray([r for r in ring if r != a and r != b and r != c], dtype=np.int64)
    if not others.size:
        return True
    p = pts[others]
    tri = pts[[a, b, c]]
    inside = np.ones(len(p), dtype=bool)
    for i in range(3):
        s, e = tri[i], tri[(i + 1) % 3]
        side = orient * ((e[0] - s[0]) * (p[:, 1] - s[1]) - (e[1] - s[1]) * (p[:, 0] - s[0]))
        inside &= side >= -eps
    # vertices coincident with a corner (pinch points) do not block the ear
    coincident = np.zeros(len(p), dtype=bool)
    for corner in tri:
        coincident |= np.all(np.abs(p - corner) <= 1e-12, axis=1)
    return not np.any(inside & ~coincident)


def cap_planar_loop(loop: BoundaryLoop, mesh: TriangleMesh, plane: Plane) -> TriangleMesh:
    """Flatten a boundary loop onto a plane and fill it with triangles.

    Loop vertices are projected exactly onto the plane first; the filling is
    wound opposite to the loop so it continues the surrounding orientation.
    Works for non-convex loops (ear clipping), unlike :func:`fan_cap`.
    """
    if len(loop) < 3:
        raise MeshError(f"cannot cap a loop of {len(loop)} vertices")
    verts = np.array(mesh.vertices)
    idx = np.asarray(loop, dtype=np.int64)
    verts[idx] = plane.project(verts[idx])
    u, w = _plane_basis(np.asarray(plane.normal))
    cap_order = idx[::-1]
    pts = np.column_stack([verts[cap_order] @ u, verts[cap_order] @ w])
    tris = triangulate_polygon(pts)
    cap = cap_order[np.asarray(tris, dtype=np.int64)]
    return TriangleMesh(verts, np.concatenate([mesh.faces, cap]))


# --- validation ---------------------------------------------------------------


def validate(mesh: TriangleMesh) -> ValidationReport:
    """Topological and geometric health check; never raises on bad input."""
    lo, hi = mesh.bounds()
    if not mesh.n_faces:
        return ValidationReport(False, True, True, 0.0, tuple(lo), tuple(hi), 0, [], mesh.n_vertices, 0)
    directed, keys, counts = _edge_counts(mesh)
    manifold = bool((counts <= 2).all())
    _, dcounts = np.unique(directed, axis=0, return_counts=True)
    consistent = bool((dcounts == 1).all())
    loops: list[BoundaryLoop] = []
    if manifold:
        try:
            loops = extract_boundary_loops(mesh)
        except MeshError:
            loops = []
    watertight = manifold and bool((counts == 2).all())
    degenerate = int((face_areas(mesh) <= AREA_EPS).sum())
    return ValidationReport(
        watertight=watertight,
        edge_manifold=manifold,
        consistently_oriented=consistent,
        signed_volume=signed_volume(mesh),
        bbox_min=tuple(float(c) for c in lo),
        bbox_max=tuple(float(c) for c in hi),
        degenerate_faces=degenerate,
        boundary_loops=loops,
        n_vertices=mesh.n_vertices,
        n_faces=mesh.n_faces,
    )


# --- primitives ---------------------------------------------------------------


def unit_cube() -> TriangleMesh:
    """Axis-aligned cube [0, 1]^3 with outward winding."""
    v = np.array(
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]],
        dtype=np.float64,
    )
    f = [
        [0, 2, 1], [0, 3, 2],  # bottom, -z
        [4, 5, 6], [4, 6, 7],  # top, +z
        [0, 1, 5], [0, 5, 4],  # -y
        [1, 2, 6], [1, 6, 5],  # +x
        [2, 3, 7], [2, 7, 6],  # +y
        [3, 0, 4], [3, 4, 7],  # -x
    ]
    return TriangleMesh(v, f)


def box(lo, hi) -> TriangleMesh:
    """Cuboid between two corners, made by scaling and moving the unit cube."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    size = hi - lo
    if np.any(size <= 0):
        raise GeometryError(f"box has non-positive extent {size.tolist()}")
    m = scaling(*size)
    m[:, 3] = lo
    return apply_affine(unit_cube(), m)


def loft(rings: list[np.ndarray]) -> np.ndarray:
    """Faces joining consecutive closed rings of equal length.

    Rings are index arrays running counter-clockwise when seen from the side
    the band should face, listed from the first ring to the last.
    """
    faces = []
    for lower, upper in zip(rings[:-1], rings[1:]):
        a, b = np.asarray(lower), np.asarray(upper)
        if len(a) != len(b):
            raise MeshError("lofted rings must have equal length")
        a1, b1 = np.roll(a, -1), np.roll(b, -1)
        faces.append(np.column_stack([a, a1, b1]))
        faces.append(np.column_stack([a, b1, b]))
    return np.concatenate(faces) if faces else np.zeros((0, 3), dtype=np.int64)


def ring_points(radius: float, z: float, segments: int) -> np.ndarray:
    """Points on a horizontal circle at angles 2*pi*k/segments.

    Axis crossings are exact so quarter-turn vertices lie exactly on the
    coordinate planes.
    """
    theta = 2.0 * np.pi * np.arange(segments) / segments
    c, s = exact_cos_sin(theta)
    return np.column_stack([radius * c, radius * s, np.full(segments, float(z))])


def exact_cos_sin(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c, s = np.cos(theta), np.sin(theta)
    c[np.abs(c) < 1e-15] = 0.0
    s[np.abs(s) < 1e-15] = 0.0
    return c, s


def open_cylinder(radius: float, z0: float, z1: float, segments: int, rings: int = 1) -> TriangleMesh:
    """Side wall of a cylinder about the z axis, open at both ends, outward."""
    zs = np.linspace(z0, z1, rings + 1)
    verts = np.concatenate([ring_points(radius, z, segments) for z in zs])
    idx = [np.arange(segments) + k * segments for k in range(rings + 1)]
    return TriangleMesh(verts, loft(idx))
