"""Smooth finger surfaces, the projection scale model, and ridge
displacement of a 2D print onto the 3D surface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import GeometryError
from .mesh import TriangleMesh, exact_cos_sin, loft
from .patterns import GrayscaleImage

NOMINAL_PX_PER_MM = 500.0 / 25.4  # 19.685
MODELING_SHRINK = 0.058
PRINTING_SHRINK = 0.1142
CASTING_SHRINK = 0.018
DEFAULT_RIDGE_HEIGHT_MM = 0.33

FRONTAL = (0.25, 0.75)
FULL = (0.0, 1.0)


@dataclass(frozen=True, eq=False)
class FingerSurface:
    """Capsule-shaped finger: axis along +z, open base ring at z=0, tip up.

    ``uv[:, 0]`` is the angle around the axis over 2*pi; ``uv[:, 1]`` the
    meridian arc length from the base, normalised to 1 at the tip pole.
    """

    mesh: TriangleMesh
    uv: np.ndarray
    normals: np.ndarray
    radius: float
    length: float  # cylindrical body only
    circumferential_segments: int

    @property
    def height(self) -> float:
        return self.length + self.radius

    @property
    def meridian_length(self) -> float:
        return self.length + 0.5 * np.pi * self.radius

    @property
    def circumference(self) -> float:
        return 2.0 * np.pi * self.radius

    def base_ring(self) -> np.ndarray:
        return np.arange(self.circumferential_segments)


def make_smooth_finger(
    diameter_mm: float,
    length_mm: float,
    circumferential_segments: int = 192,
    axial_segments: int = 64,
    tip_segments: int | None = None,
) -> FingerSurface:
    """Cylinder body closed by a hemispherical tip, with analytic normals.

    ``circumferential_segments`` must be a multiple of 4 so that vertices sit
    exactly on the coordinate planes through the axis.
    """
    if diameter_mm <= 0 or length_mm <= 0:
        raise GeometryError(f"finger dimensions must be positive (diameter={diameter_mm}, length={length_mm})")
    n = int(circumferential_segments)
    if n < 8 or n % 4:
        raise GeometryError("circumferential segments must be a multiple of 4 and at least 8")
    if axial_segments < 1:
        raise GeometryError("need at least one axial segment")
    tips = tip_segments or max(2, n // 4)
    r = diameter_mm / 2.0
    theta = 2.0 * np.pi * np.arange(n) / n
    cos_t, sin_t = exact_cos_sin(theta)

    rings_xyz, rings_nrm, rings_v = [], [], []
    total = length_mm + 0.5 * np.pi * r
    for z in np.linspace(0.0, length_mm, axial_segments + 1):
        rings_xyz.append(np.column_stack([r * cos_t, r * sin_t, np.full(n, z)]))
        rings_nrm.append(np.column_stack([cos_t, sin_t, np.zeros(n)]))
        rings_v.append(np.full(n, z / total))
    for j in range(1, tips):
        phi = 0.5 * np.pi * j / tips
        cp, sp = np.cos(phi), np.sin(phi)
        rings_xyz.append(np.column_stack([r * cp * cos_t, r * cp * sin_t, np.full(n, length_mm + r * sp)]))
        rings_nrm.append(np.column_stack([cp * cos_t, cp * sin_t, np.full(n, sp)]))
        rings_v.append(np.full(n, (length_mm + r * phi) / total))

    n_rings = len(rings_xyz)
    pole = n_rings * n
    verts = np.vstack(rings_xyz + [[0.0, 0.0, length_mm + r]])
    normals = np.vstack(rings_nrm + [[0.0, 0.0, 1.0]])
    u = np.concatenate([theta / (2.0 * np.pi)] * n_rings + [[0.5]])
    v = np.concatenate(rings_v + [[1.0]])

    rings = [np.arange(n) + k * n for k in range(n_rings)]
    last = rings[-1]
    fan = np.column_stack([last, np.roll(last, -1), np.full(n, pole)])
    faces = np.concatenate([loft(rings), fan])
    return FingerSurface(
        mesh=TriangleMesh(verts, faces),
        uv=np.column_stack([u, v]),
        normals=normals,
        radius=r,
        length=float(length_mm),
        circumferential_segments=n,
    )


# --- projection scale ---------------------------------------------------------------


@dataclass(frozen=True)
class ScaleModel:
    """Shrink fractions accumulated between the 2D print and the cast target."""

    nominal_scale: float = NOMINAL_PX_PER_MM
    e_model: float = MODELING_SHRINK
    e_print: float = PRINTING_SHRINK
    e_cast: float = CASTING_SHRINK

    def __post_init__(self):
        if not self.nominal_scale > 0:
            raise ValueError("nominal scale must be positive")
        for name in ("e_model", "e_print", "e_cast"):
            value = getattr(self, name)
            if not 0 <= value < 0.5:
                raise ValueError(f"{name}={value} outside [0, 0.5)")

    def total_error(self, include_cast: bool = False) -> float:
        """Shrink fractions add: 5.8% + 11.42% = 17.22%."""
        return self.e_model + self.e_print + (self.e_cast if include_cast else 0.0)


def compensated_scale(model: ScaleModel, include_cast: bool = False) -> float:
    """Projection scale (px/mm) that cancels the accumulated shrinkage."""
    return model.nominal_scale / (1.0 + model.total_error(include_cast))


def expected_physical_distance(pixels: float, model: ScaleModel) -> float:
    """Size on the cast target of a distance drawn in the 2D pattern."""
    if pixels < 0:
        raise ValueError("pixel distance must be non-negative")
    return pixels / model.nominal_scale


def scale_for_mode(mode: str, model: ScaleModel) -> float:
    if mode == "nominal":
        return model.nominal_scale
    if mode == "compensated":
        return compensated_scale(model, include_cast=False)
    if mode == "compensated+cast":
        return compensated_scale(model, include_cast=True)
    raise ValueError(f"unknown scale mode {mode!r}")


# --- displacement -------------------------------------------------------------------


def required_image_size(surface: FingerSurface, scale: float, coverage=FRONTAL) -> tuple[int, int]:
    """(width, height) in pixels the image must have to cover the mapped band."""
    u0, u1 = coverage
    width = (u1 - u0) * surface.circumference * scale
    height = surface.meridian_length * scale
    return int(np.ceil(width)), int(np.ceil(height))


def pixel_coordinates(image: GrayscaleImage, surface: FingerSurface, scale: float, coverage=FRONTAL):
    """Image (column, row) sampled by each vertex; the band centre maps to the
    image's centre column and the tip pole to row 0."""
    u0, u1 = coverage
    uc = 0.5 * (u0 + u1)
    col = (image.width - 1) / 2.0 + (surface.uv[:, 0] - uc) * surface.circumference * scale
    row = (1.0 - surface.uv[:, 1]) * surface.meridian_length * scale
    inside = (surface.uv[:, 0] >= u0) & (surface.uv[:, 0] <= u1)
    return col, row, inside


def ridge_displacement(
    image: GrayscaleImage,
    surface: FingerSurface,
    scale: float,
    ridge_height_mm: float = DEFAULT_RIDGE_HEIGHT_MM,
    coverage=FRONTAL,
) -> np.ndarray:
    """Per-vertex outward displacement ``h * (1 - I/255)`` (zero off-band)."""
    if not 0 < ridge_height_mm <= 1.0:
        raise ValueError(f"ridge height {ridge_height_mm} mm outside (0, 1]")
    need_w, need_h = required_image_size(surface, scale, coverage)
    if image.width < need_w or image.height < need_h:
        raise GeometryError(
            f"image {image.width}x{image.height} px too small for the surface at {scale:.3f} px/mm; "
            f"needs at least {need_w}x{need_h} px"
        )
    col, row, inside = pixel_coordinates(image, surface, scale, coverage)
    intensity = ndimage.map_coordinates(
        image.pixels.astype(np.float64), np.array([row, col]), order=1, mode="nearest"
    )
    disp = ridge_height_mm * (1.0 - intensity / 255.0)
    return np.where(inside, disp, 0.0)


def map_image_to_surface(
    image: GrayscaleImage,
    surface: FingerSurface,
    scale: float,
    ridge_height_mm: float = DEFAULT_RIDGE_HEIGHT_MM,
    coverage=FRONTAL,
) -> TriangleMesh:
    """Raise dark pixels out of the surface along the vertex normals.

    The print is unrolled by arc length: one pixel spans ``1/scale`` mm both
    around the finger and along its meridians.  Faces are left untouched.
    """
    disp = ridge_displacement(image, surface, scale, ridge_height_mm, coverage)
    return TriangleMesh(surface.mesh.vertices + surface.normals * disp[:, None], surface.mesh.faces)
