"""Ridge-spacing metrology on images and fidelity summaries.

Spacing is estimated per window from the dominant peak of the 2D power
spectrum; the windows are tapered so the peak is smooth enough for a
three-point log-quadratic fit to land between DFT bins accurately.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import MeasurementError
from .patterns import GrayscaleImage

ENERGY_RATIO_MIN = 4.0
MIN_CYCLES = 2.0  # per window


@dataclass
class SpacingReport:
    mean_px: float
    std_px: float
    mean_mm: float
    std_mm: float
    window_count: int
    expected_px: float | None = None
    spacings_px: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @property
    def deviation_pct(self) -> float | None:
        if self.expected_px is None:
            return None
        return 100.0 * (self.mean_px - self.expected_px) / self.expected_px


def _quadratic_offset(left: float, centre: float, right: float) -> float:
    den = left - 2.0 * centre + right
    if den >= 0:  # not a strict maximum; stay on the bin
        return 0.0
    return float(np.clip(0.5 * (left - right) / den, -0.5, 0.5))


def window_spacing(block: np.ndarray) -> tuple[float, float] | None:
    """Dominant period of one square block and its peak-to-mean energy ratio.

    Returns None for blocks without spectral energy (flat blocks).
    """
    n = block.shape[0]
    b = block.astype(np.float64)
    b = b - b.mean()
    taper = np.hanning(n)
    b = b * np.outer(taper, taper)
    mag = np.abs(np.fft.fft2(b))
    power = mag**2
    power[0, 0] = 0.0
    mean_power = power.mean()
    if mean_power <= 1e-12:
        return None
    # periods longer than half the window are not ridges (edges, shading)
    f = np.fft.fftfreq(n) * n
    band = np.hypot(f[:, None], f[None, :]) >= MIN_CYCLES
    ky, kx = np.unravel_index(int(np.argmax(np.where(band, power, -1.0))), power.shape)
    ratio = float(power[ky, kx] / mean_power)
    logm = np.log(np.maximum(mag, 1e-300))
    dy = _quadratic_offset(logm[(ky - 1) % n, kx], logm[ky, kx], logm[(ky + 1) % n, kx])
    dx = _quadratic_offset(logm[ky, (kx - 1) % n], logm[ky, kx], logm[ky, (kx + 1) % n])
    fy = ky if ky <= n // 2 else ky - n
    fx = kx if kx <= n // 2 else kx - n
    k = np.hypot(fy + dy, fx + dx)
    if k == 0:
        return None
    return n / k, ratio


def ridge_spacing(
    image: GrayscaleImage,
    window_px: int = 64,
    step_px: int = 32,
    expected_px: float | None = None,
) -> SpacingReport:
    """Mean and spread of the centre-to-centre ridge spacing over windows.

    Windows whose spectral peak carries less than ``ENERGY_RATIO_MIN`` times
    the mean spectral power are treated as background and skipped.
    """
    if window_px < 4 or step_px < 1:
        raise ValueError("window must be >= 4 px and step >= 1 px")
    px = image.pixels
    h, w = px.shape
    if h < window_px or w < window_px:
        raise MeasurementError(f"image {w}x{h} is smaller than the {window_px}px window")
    spacings = []
    for y0 in range(0, h - window_px + 1, step_px):
        for x0 in range(0, w - window_px + 1, step_px):
            found = window_spacing(px[y0 : y0 + window_px, x0 : x0 + window_px])
            if found is None:
                continue
            spacing, ratio = found
            if ratio >= ENERGY_RATIO_MIN:
                spacings.append(spacing)
    if not spacings:
        raise MeasurementError("no periodic ridge structure found")
    s = np.asarray(spacings)
    mm_per_px = 25.4 / image.ppi
    mean, std = float(s.mean()), float(s.std())
    return SpacingReport(mean, std, mean * mm_per_px, std * mm_per_px, len(s), expected_px, s)


def expected_spacing_px(period_px: float, cast_shrink: float = 0.02) -> float:
    """Spacing a reader should see after the cast target shrinks."""
    if period_px <= 0:
        raise ValueError("period must be positive")
    return period_px * (1.0 - cast_shrink)


@dataclass
class FidelitySummary:
    mean_mm: float
    std_mm: float
    expected_mm: float
    reduction_pct: float
    count: int


def point_to_point_report(measured_mm, expected_mm: float) -> FidelitySummary:
    """Percent shrinkage of measured distances relative to the design value."""
    m = np.asarray(list(measured_mm), dtype=np.float64)
    if not m.size:
        raise ValueError("no measurements")
    mean = float(m.mean())
    return FidelitySummary(mean, float(m.std()), expected_mm, 100.0 * (expected_mm - mean) / expected_mm, int(m.size))


# --- report emission ----------------------------------------------------------------

SPACING_COLUMNS = ("pattern", "reader", "mean_px", "std_px", "expected_px", "deviation_pct")


def spacing_rows(results: list[tuple[str, str, SpacingReport]]) -> list[dict]:
    rows = []
    for pattern, reader, rep in results:
        rows.append(
            {
                "pattern": pattern,
                "reader": reader,
                "mean_px": f"{rep.mean_px:.3f}",
                "std_px": f"{rep.std_px:.3f}",
                "expected_px": "" if rep.expected_px is None else f"{rep.expected_px:.3f}",
                "deviation_pct": "" if rep.deviation_pct is None else f"{rep.deviation_pct:.2f}",
            }
        )
    return rows


def spacing_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SPACING_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(spacing_rows(results))
    return buf.getvalue()


def spacing_table(results) -> str:
    """Patterns as rows, readers as columns, ``mean (std)`` in each cell."""
    patterns = sorted({p for p, _, _ in results})
    readers = sorted({r for _, r, _ in results})
    cell = {(p, r): rep for p, r, rep in results}
    col0 = max([len("pattern")] + [len(p) for p in patterns])
    width = max([16] + [len(r) for r in readers])
    lines = ["pattern".ljust(col0) + "".join(r.rjust(width + 2) for r in readers)]
    for p in patterns:
        parts = []
        for r in readers:
            rep = cell.get((p, r))
            parts.append(("-" if rep is None else f"{rep.mean_px:.2f} ({rep.std_px:.2f})").rjust(width + 2))
        lines.append(p.ljust(col0) + "".join(parts))
    expected = {rep.expected_px for _, _, rep in results if rep.expected_px is not None}
    if len(expected) == 1:
        lines.append(f"expected spacing: {expected.pop():.2f} px")
    return "\n".join(lines) + "\n"
