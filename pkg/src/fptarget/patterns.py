"""Grayscale rasters: sine-grating calibration patterns, PGM/PNG I/O, and
simulated reader impressions.

Intensity convention: 0 is a ridge (black), 255 a valley (white).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import FormatError

DEFAULT_PPI = 500.0


@dataclass(frozen=True, eq=False)
class GrayscaleImage:
    pixels: np.ndarray  # (height, width) uint8
    ppi: float = DEFAULT_PPI

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"expected a 2D pixel array, got shape {px.shape}")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        if not self.ppi > 0:
            raise ValueError(f"ppi must be positive, got {self.ppi}")
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "ppi", float(self.ppi))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def px_per_mm(self) -> float:
        return self.ppi / 25.4

    def __eq__(self, other):
        if not isinstance(other, GrayscaleImage):
            return NotImplemented
        return self.ppi == other.ppi and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


class GratingKind(str, enum.Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"
    CIRCULAR = "circular"


def sine_grating(
    kind: GratingKind | str,
    period_px: float,
    width: int = 512,
    height: int = 512,
    ppi: float = DEFAULT_PPI,
) -> GrayscaleImage:
    """Raised-cosine grating, white where the phase distance is a whole period.

    Vertical gratings vary along x, horizontal along y, circular with the
    distance from the image centre ``((w-1)/2, (h-1)/2)``.
    """
    kind = GratingKind(kind)
    if period_px < 2:
        raise ValueError(f"period must be at least 2 px, got {period_px}")
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    if kind is GratingKind.VERTICAL:
        d = x
    elif kind is GratingKind.HORIZONTAL:
        d = y
    else:
        d = np.hypot(x - (width - 1) / 2.0, y - (height - 1) / 2.0)
    values = np.round(127.5 * (1.0 + np.cos(2.0 * np.pi * d / period_px)))
    return GrayscaleImage(values.astype(np.uint8), ppi)


# --- file I/O -----------------------------------------------------------------


def write_pgm(image: GrayscaleImage, path) -> Path:
    """Write binary PGM; a non-default resolution goes to a ``.ppi`` sidecar."""
    path = Path(path)
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    path.write_bytes(header + image.pixels.tobytes())
    sidecar = path.with_name(path.name + ".ppi")
    if image.ppi != DEFAULT_PPI:
        sidecar.write_text(f"{image.ppi!r}\n")
    elif sidecar.exists():
        sidecar.unlink()
    return path


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header", offset=pos)
        tokens.append(data[start:pos])
    return tokens, pos + 1  # single whitespace byte after maxval


def parse_pgm(data: bytes, ppi: float = DEFAULT_PPI) -> GrayscaleImage:
    if not data.startswith(b"P5"):
        raise FormatError("not a binary PGM (P5) file", offset=0)
    tokens, start = _pgm_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as exc:
        raise FormatError("malformed PGM header") from exc
    if maxval != 255:
        raise FormatError(f"unsupported PGM maxval {maxval}; only 8-bit (255) is accepted")
    n = width * height
    body = data[start : start + n]
    if len(body) < n:
        raise FormatError(f"PGM pixel data truncated: {len(body)} of {n} bytes", offset=start + len(body))
    return GrayscaleImage(np.frombuffer(body, dtype=np.uint8).reshape(height, width), ppi)


def _sidecar_ppi(path: Path) -> float | None:
    sidecar = path.with_name(path.name + ".ppi")
    if sidecar.exists():
        return float(sidecar.read_text().strip())
    return None


def load_image(path, ppi: float | None = None) -> GrayscaleImage:
    """Load an 8-bit P5 PGM or 8-bit grayscale PNG.

    Resolution comes from the ``ppi`` argument, else a ``<file>.ppi`` sidecar
    holding one number, else 500 ppi.
    """
    path = Path(path)
    if ppi is None:
        ppi = _sidecar_ppi(path) or DEFAULT_PPI
    data = path.read_bytes()
    if data.startswith(b"P5"):
        return parse_pgm(data, ppi)
    if data.startswith(b"\x89PNG"):
        from PIL import Image

        with Image.open(path) as im:
            if im.mode != "L":
                raise FormatError(f"PNG mode {im.mode!r} is not 8-bit grayscale")
            return GrayscaleImage(np.array(im, dtype=np.uint8), ppi)
    raise FormatError(f"{path.name}: unsupported image format (expected P5 PGM or grayscale PNG)", offset=0)


# --- simulated capture ------------------------------------------------------------


def synth_impression(
    pattern: GrayscaleImage,
    scale_factor: float,
    noise_std: float = 0.0,
    seed: int = 0,
) -> GrayscaleImage:
    """Simulated reader capture: scale about the centre plus Gaussian noise.

    A feature at distance r from the centre lands at ``scale_factor * r``.
    Pixels that map outside the source read as background (255).
    """
    if not 0.5 <= scale_factor <= 2.0:
        raise ValueError(f"scale factor {scale_factor} outside [0.5, 2]")
    if noise_std < 0:
        raise ValueError("noise std must be non-negative")
    h, w = pattern.height, pattern.width
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    src = np.array([cy + (y - cy) / scale_factor, cx + (x - cx) / scale_factor])
    out = ndimage.map_coordinates(pattern.pixels.astype(np.float64), src, order=1, mode="constant", cval=255.0)
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        out = out + rng.normal(0.0, noise_std, size=out.shape)
    return GrayscaleImage(np.clip(np.round(out), 0, 255).astype(np.uint8), pattern.ppi)
