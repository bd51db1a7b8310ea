"""Scaffolding framework: base frame that seats the mold, two side walls, and
a top plate from which the shrunken inner surface hangs into the cavity.

Everything is placed in the mold frame of :mod:`fptarget.mold`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import GeometryError
from .mesh import (
    TriangleMesh,
    apply_affine,
    box,
    extract_boundary_loops,
    fan_cap,
    loft,
    stitch_boundaries,
    validate,
)
from .mold import MoldSpec, mold_frame
from .projection import FingerSurface

MIN_CASTING_GAP_MM = 0.1


@dataclass(frozen=True)
class ScaffoldSpec:
    wall_mm: float = 9.0
    cutout_mm: float = 34.0
    shrink_offset_mm: float = 1.5
    clearance_mm: float = 20.0  # side walls rise this far above the mold top

    def __post_init__(self):
        if self.wall_mm <= 0 or self.cutout_mm <= 0:
            raise ValueError("wall and cutout must be positive")
        if self.shrink_offset_mm < 0 or self.clearance_mm <= 0:
            raise ValueError("offset must be non-negative and clearance positive")


def _shrunken_vertices(surface: FingerSurface, offset_mm: float) -> np.ndarray:
    if offset_mm >= surface.radius:
        raise GeometryError(
            f"offset {offset_mm} mm reaches the surface's minimum radius {surface.radius} mm; the surface would invert"
        )
    return surface.mesh.vertices - surface.normals * offset_mm


def shrink_surface(surface: FingerSurface, offset_mm: float = 1.5) -> TriangleMesh:
    """Move every vertex ``offset_mm`` against its normal, then close the
    open base with a triangle fan."""
    shrunk = TriangleMesh(_shrunken_vertices(surface, offset_mm), surface.mesh.faces)
    (base,) = extract_boundary_loops(shrunk)
    return fan_cap(base, shrunk)


def _square_ring(half: float, z: float, n: int) -> np.ndarray:
    """n points on the square |x|,|y| = half, at the same polar angles as a
    circle ring of n segments (corners included when n % 8 == 0)."""
    theta = 2.0 * np.pi * np.arange(n) / n
    c, s = np.cos(theta), np.sin(theta)
    t = half / np.maximum(np.abs(c), np.abs(s))
    pts = np.column_stack([t * c, t * s, np.full(n, z)])
    pts[:, :2] = np.clip(np.round(pts[:, :2], 12), -half, half)
    return pts


def _base_frame(outer: float, inner: float, z0: float, z1: float) -> TriangleMesh:
    """Square ring: outer box with a concentric square cut clean through."""
    n = 16
    verts = np.vstack([
        _square_ring(outer / 2, z0, n),
        _square_ring(outer / 2, z1, n),
        _square_ring(inner / 2, z0, n),
        _square_ring(inner / 2, z1, n),
    ])
    o0, o1, i0, i1 = (np.arange(n) + k * n for k in range(4))
    outer_wall = loft([o0, o1])
    inner_wall = loft([i0, i1])[:, ::-1]
    frame = TriangleMesh(verts, np.concatenate([outer_wall, inner_wall]))
    loops = {frozenset(l): l for l in extract_boundary_loops(frame)}
    frame = stitch_boundaries(loops[frozenset(o1.tolist())], loops[frozenset(i1.tolist())], frame)
    frame = stitch_boundaries(loops[frozenset(i0.tolist())], loops[frozenset(o0.tolist())], frame)
    return frame


def _top_part(
    surface: FingerSurface,
    offset_mm: float,
    shell_height: float,
    plate_half: float,
    plate_z0: float,
    plate_z1: float,
) -> TriangleMesh:
    """Plate with the shrunken finger hanging from its underside.

    The shrunken surface is extended up to the plate by a straight collar and
    the plate's lower face is an annulus around the collar rim, so plate and
    finger form one closed solid.
    """
    n = surface.circumferential_segments
    inner_finger = TriangleMesh(_shrunken_vertices(surface, offset_mm), surface.mesh.faces)
    inner_finger = apply_affine(inner_finger, mold_frame(shell_height))
    base_ring = inner_finger.vertices[surface.base_ring()]
    # mold_frame mirrors y, so the base ring now winds clockwise seen from +z
    collar_top = base_ring.copy()
    collar_top[:, 2] = plate_z0

    nv = inner_finger.n_vertices
    verts = np.vstack([
        inner_finger.vertices,
        collar_top,
        _square_ring(plate_half, plate_z0, n),
        _square_ring(plate_half, plate_z1, n),
    ])
    ring_base = surface.base_ring()
    ring_collar = np.arange(n) + nv
    ring_plate0 = np.arange(n) + nv + n
    ring_plate1 = np.arange(n) + nv + 2 * n
    # the finger rings run clockwise from above after the mirror, the plate
    # rings counter-clockwise
    collar = loft([ring_base, ring_collar])[:, ::-1]
    plate_wall_faces = loft([ring_plate0, ring_plate1])
    part = TriangleMesh(verts, np.concatenate([inner_finger.faces, collar, plate_wall_faces]))
    loops = {frozenset(l): l for l in extract_boundary_loops(part)}
    part = stitch_boundaries(
        loops[frozenset(ring_plate0.tolist())], loops[frozenset(ring_collar.tolist())], part
    )
    part = fan_cap(loops[frozenset(ring_plate1.tolist())], part)
    return part


def casting_gap(surface: FingerSurface, offset_mm: float, shell_height: float) -> tuple[float, np.ndarray]:
    """Smallest distance from the hanging surface to the cavity wall.

    Measured from each shrunken vertex to the nearest vertex of the smooth
    cavity surface; returns the distance and the offending point.
    """
    frame = mold_frame(shell_height)
    cavity = apply_affine(surface.mesh, frame).vertices
    hanging = apply_affine(TriangleMesh(_shrunken_vertices(surface, offset_mm), surface.mesh.faces), frame).vertices
    dist, _ = cKDTree(cavity).query(hanging)
    k = int(np.argmin(dist))
    return float(dist[k]), hanging[k]


def build_scaffold(
    mold_spec: MoldSpec,
    scaffold_spec: ScaffoldSpec,
    surface: FingerSurface,
) -> dict[str, TriangleMesh]:
    """Base, two side walls, and the top plate carrying the inner surface.

    Returns parts keyed ``base``, ``side_a``, ``side_b``, ``top``.
    """
    if abs(scaffold_spec.cutout_mm - mold_spec.shell_diameter_mm) > 1e-9:
        raise GeometryError(
            f"base cutout {scaffold_spec.cutout_mm} mm must equal the mold shell diameter {mold_spec.shell_diameter_mm} mm"
        )
    shell_height = mold_spec.height_factor * surface.height
    wall = scaffold_spec.wall_mm
    cut = scaffold_spec.cutout_mm
    outer = cut + 2.0 * wall
    lock_h = mold_spec.lock_cross_section_mm[1]

    gap, where = casting_gap(surface, scaffold_spec.shrink_offset_mm, shell_height)
    if gap < MIN_CASTING_GAP_MM:
        raise GeometryError(
            f"inner surface comes within {gap:.3f} mm of the cavity at ({where[0]:.3f}, {where[1]:.3f}, {where[2]:.3f})"
        )

    base_z0 = -lock_h
    base_z1 = base_z0 + wall
    top_z0 = shell_height + scaffold_spec.clearance_mm
    top_z1 = top_z0 + wall
    half_in, half_out = cut / 2.0, outer / 2.0

    parts = {
        "base": _base_frame(outer, cut, base_z0, base_z1),
        "side_a": box((half_in, -half_out, base_z1), (half_out, half_out, top_z0)),
        "side_b": box((-half_out, -half_out, base_z1), (-half_in, half_out, top_z0)),
        "top": _top_part(surface, scaffold_spec.shrink_offset_mm, shell_height, half_out, top_z0, top_z1),
    }
    for name, part in parts.items():
        report = validate(part)
        if not report.ok:
            raise GeometryError(f"internal: scaffold part {name!r} is not a closed outward solid")
    return parts


def scaffold_dimensions(mold_spec: MoldSpec, scaffold_spec: ScaffoldSpec, surface: FingerSurface) -> dict[str, float]:
    shell_height = mold_spec.height_factor * surface.height
    return {
        "scaffold.wall_mm": scaffold_spec.wall_mm,
        "scaffold.cutout_mm": scaffold_spec.cutout_mm,
        "scaffold.outer_mm": scaffold_spec.cutout_mm + 2.0 * scaffold_spec.wall_mm,
        "scaffold.shrink_offset_mm": scaffold_spec.shrink_offset_mm,
        "scaffold.side_height_mm": shell_height + scaffold_spec.clearance_mm
        - (scaffold_spec.wall_mm - mold_spec.lock_cross_section_mm[1]),
        "scaffold.inner_surface_diameter_mm": 2.0 * (surface.radius - scaffold_spec.shrink_offset_mm),
        "scaffold.casting_gap_mm": casting_gap(surface, scaffold_spec.shrink_offset_mm, shell_height)[0],
    }
