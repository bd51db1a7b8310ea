"""Two-piece negative mold around a ridge-displaced finger surface.

Mold frame: the shell axis is the z axis, the shell spans ``0 <= z <= H``
with the cavity opening at the top (z = H) and the finger tip pointing down.
The mold is split by the plane x = 0; the frontal print faces -x and so
stays whole inside the lower half.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError
from .mesh import (
    Plane,
    TriangleMesh,
    ValidationReport,
    apply_affine,
    box,
    cap_planar_loop,
    extract_boundary_loops,
    fan_cap,
    invert_faces,
    merge,
    open_cylinder,
    split_by_plane,
    stitch_boundaries,
    validate,
)

SPLIT_PLANE = Plane((1.0, 0.0, 0.0), 0.0)
MAX_FINGER_DIAMETER_MM = 27.0


@dataclass(frozen=True)
class MoldSpec:
    shell_diameter_mm: float = 34.0
    height_factor: float = 1.25
    min_wall_mm: float = 3.5
    lock_length_mm: float = 34.0
    lock_cross_section_mm: tuple[float, float] = (4.0, 4.0)  # (width, height)
    # ridges may eat into the wall by up to this much before the build fails
    ridge_allowance_mm: float = 1.0

    def __post_init__(self):
        if self.height_factor <= 1:
            raise ValueError("height factor must exceed 1")
        if self.shell_diameter_mm <= 0 or self.min_wall_mm < 0:
            raise ValueError("shell diameter must be positive and wall non-negative")
        if self.lock_length_mm <= 0 or min(self.lock_cross_section_mm) <= 0:
            raise ValueError("lock dimensions must be positive")

    @property
    def shell_radius(self) -> float:
        return self.shell_diameter_mm / 2.0

    def max_finger_diameter(self) -> float:
        return self.shell_diameter_mm - 2.0 * self.min_wall_mm


@dataclass
class MoldAssembly:
    half_above: TriangleMesh  # x >= 0
    half_below: TriangleMesh  # x <= 0, carries the frontal print
    spec: MoldSpec
    inner_surface: TriangleMesh  # inverted finger surface in the mold frame
    finger_height_mm: float
    shell_height_mm: float
    locks: tuple[tuple[float, ...], ...] = field(default=())  # (x0, x1, y0, y1, z0, z1) per lock

    def halves(self) -> dict[str, TriangleMesh]:
        return {"mold_above": self.half_above, "mold_below": self.half_below}

    def lock_footprints(self) -> list[tuple[float, float]]:
        return sorted((round(b[1] - b[0], 9), round(b[3] - b[2], 9)) for b in self.locks)

    def dimensions(self) -> dict[str, float]:
        w, h = self.spec.lock_cross_section_mm
        return {
            "mold.shell_diameter_mm": self.spec.shell_diameter_mm,
            "mold.shell_height_mm": self.shell_height_mm,
            "mold.finger_height_mm": self.finger_height_mm,
            "mold.height_factor": self.spec.height_factor,
            "mold.min_wall_thickness_mm": min_wall_thickness(self),
            "mold.design_min_wall_mm": self.spec.min_wall_mm,
            "mold.lock_count": float(len(self.locks)),
            "mold.lock_length_mm": self.spec.lock_length_mm,
            "mold.lock_width_mm": w,
            "mold.lock_height_mm": h,
        }


def mold_frame(shell_height: float) -> np.ndarray:
    """Finger frame (tip up, base at z=0) to mold frame (tip down, base at top).

    A half turn about the x axis followed by a lift; x is unchanged so the
    split plane x = 0 keeps its on-plane vertices.
    """
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, shell_height],
        ]
    )


def _radial(points: np.ndarray) -> np.ndarray:
    return np.hypot(points[:, 0], points[:, 1])


def min_wall_thickness(assembly: MoldAssembly) -> float:
    """Shell radius minus the largest radial reach of the cavity surface."""
    return float(assembly.spec.shell_radius - _radial(assembly.inner_surface.vertices).max())


def mold_halves_interchangeable(a: MoldAssembly, b: MoldAssembly) -> bool:
    """Whether both molds seat in the same scaffold (same shell and locks)."""
    if abs(a.spec.shell_diameter_mm - b.spec.shell_diameter_mm) > 1e-6:
        return False
    fa, fb = a.lock_footprints(), b.lock_footprints()
    if len(fa) != len(fb):
        return False
    return all(abs(x0 - x1) <= 1e-6 and abs(y0 - y1) <= 1e-6 for (x0, y0), (x1, y1) in zip(fa, fb))


def _check_surface(surface: TriangleMesh) -> tuple[int, ...]:
    loops = extract_boundary_loops(surface)
    if len(loops) != 1:
        raise GeometryError(f"finger surface must have exactly one open end, found {len(loops)} boundary loops")
    return loops[0]


def _lock_box(spec: MoldSpec, side: int) -> tuple[float, ...]:
    w, h = spec.lock_cross_section_mm
    cx = side * spec.shell_radius / 2.0
    half = spec.lock_length_mm / 2.0
    return (cx - w / 2.0, cx + w / 2.0, -half, half, -h, 0.0)


def build_mold(
    displaced_surface: TriangleMesh,
    finger_height_mm: float,
    spec: MoldSpec = MoldSpec(),
    shell_segments: int | None = None,
) -> MoldAssembly:
    """Negative mold: invert the print surface, wrap it in a cylindrical
    shell, split into halves, flatten the cut faces, and add the locks.

    The surface is given in the finger frame (open base ring at z = 0, tip
    towards +z).
    """
    base_loop = _check_surface(displaced_surface)
    shell_height = spec.height_factor * finger_height_mm
    radius = spec.shell_radius

    inner = apply_affine(invert_faces(displaced_surface), mold_frame(shell_height))
    reach = _radial(inner.vertices)
    worst = int(np.argmax(reach))
    wall = radius - float(reach[worst])
    if wall < spec.min_wall_mm - spec.ridge_allowance_mm:
        x, y, z = inner.vertices[worst]
        raise GeometryError(
            f"mold wall {wall:.3f} mm is below the {spec.min_wall_mm} mm minimum "
            f"at ({x:.3f}, {y:.3f}, {z:.3f}) mm"
        )
    zmin = float(inner.vertices[:, 2].min())
    if zmin <= 0:
        raise GeometryError(f"finger reaches z={zmin:.3f} mm, through the bottom of the shell")

    if shell_segments is None:
        shell_segments = len(base_loop) if len(base_loop) % 4 == 0 and len(base_loop) >= 64 else 192
    rings = max(1, int(round(shell_height / 4.0)))
    shell = open_cylinder(radius, 0.0, shell_height, shell_segments, rings)
    solid = merge(shell, inner)

    # shell bottom gets a flat fan cap; the top ring is joined to the cavity rim
    loops = extract_boundary_loops(solid)
    shell_bottom = tuple(range(shell_segments))
    shell_top = tuple(int(i) for i in range(rings * shell_segments, (rings + 1) * shell_segments))
    cavity_rim = [l for l in loops if min(l) >= shell.n_vertices]
    if len(loops) != 3 or len(cavity_rim) != 1:
        raise GeometryError(f"unexpected boundary layout before closing the shell: {len(loops)} loops")
    by_set = {frozenset(l): l for l in loops}
    bottom = by_set[frozenset(shell_bottom)]
    top = by_set[frozenset(shell_top)]
    solid = fan_cap(bottom, solid)
    solid = stitch_boundaries(top, cavity_rim[0], solid)
    report = validate(solid)
    if not report.watertight or report.signed_volume <= 0:
        raise GeometryError(f"internal: closed mold is not a solid ({_loop_dump(report)})")

    above, below = split_by_plane(solid, SPLIT_PLANE)
    halves = []
    locks = []
    for part, side in ((above, 1), (below, -1)):
        for loop in extract_boundary_loops(part):
            part = cap_planar_loop(loop, part, SPLIT_PLANE)
        lock = _lock_box(spec, side)
        locks.append(lock)
        part = merge(part, box(lock[0::2], lock[1::2]))
        report = validate(part)
        if not report.ok:
            raise GeometryError(f"internal: mold half (side {side:+d}) is not printable ({_loop_dump(report)})")
        halves.append(part)

    return MoldAssembly(
        half_above=halves[0],
        half_below=halves[1],
        spec=spec,
        inner_surface=inner,
        finger_height_mm=float(finger_height_mm),
        shell_height_mm=float(shell_height),
        locks=tuple(locks),
    )


def _loop_dump(report: ValidationReport) -> str:
    parts = [
        f"watertight={report.watertight}",
        f"manifold={report.edge_manifold}",
        f"volume={report.signed_volume:.3f}",
        f"degenerate={report.degenerate_faces}",
    ]
    for loop in report.boundary_loops[:5]:
        parts.append(f"loop[{len(loop)}]={list(loop[:12])}{'...' if len(loop) > 12 else ''}")
    return ", ".join(parts)
