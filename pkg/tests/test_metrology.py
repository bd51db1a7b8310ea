from __future__ import annotations

import numpy as np
import pytest
from scipy import ndimage

from fptarget.errors import MeasurementError
from fptarget.metrology import (
    expected_spacing_px,
    point_to_point_report,
    ridge_spacing,
    spacing_csv,
    spacing_table,
    window_spacing,
)
from fptarget.patterns import GrayscaleImage, sine_grating, synth_impression

TABLE2 = (0.509, 0.501, 0.513, 0.496, 0.490, 0.486)


@pytest.fixture(scope="module")
def vertical():
    return sine_grating("vertical", 10, 512, 512)


def test_vertical_grating(vertical):
    rep = ridge_spacing(vertical)
    assert rep.mean_px == pytest.approx(10.0, abs=0.1)
    assert rep.std_px < 0.1
    assert rep.mean_mm == pytest.approx(rep.mean_px * 25.4 / 500)
    assert rep.window_count == 15 * 15


@pytest.mark.parametrize("kind", ["horizontal", "circular"])
def test_other_gratings(kind):
    rep = ridge_spacing(sine_grating(kind, 10, 512, 512))
    assert rep.mean_px == pytest.approx(10.0, abs=0.1)


@pytest.mark.parametrize("period", [7.0, 9.25, 12.5])
def test_off_bin_periods(period):
    assert ridge_spacing(sine_grating("vertical", period, 256, 256)).mean_px == pytest.approx(period, rel=0.01)


def test_scaled_impression(vertical):
    rep = ridge_spacing(synth_impression(vertical, 0.98, 5, seed=7), expected_px=9.8)
    assert rep.mean_px == pytest.approx(9.8, abs=0.2)
    assert abs(rep.deviation_pct) < 2


def test_blank_image():
    with pytest.raises(MeasurementError, match="no periodic ridge structure found"):
        ridge_spacing(GrayscaleImage(np.full((128, 128), 255, np.uint8)))


def test_window_larger_than_image():
    with pytest.raises(MeasurementError):
        ridge_spacing(GrayscaleImage(np.zeros((32, 32), np.uint8)))


def test_rotation_consistent(vertical):
    a = ridge_spacing(vertical).mean_px
    b = ridge_spacing(GrayscaleImage(np.ascontiguousarray(np.rot90(vertical.pixels)))).mean_px
    assert b == pytest.approx(a, rel=0.02)
    rot = ndimage.rotate(vertical.pixels.astype(float), 30, reshape=False, mode="reflect", order=1)
    c = ridge_spacing(GrayscaleImage(np.clip(np.round(rot), 0, 255).astype(np.uint8))).mean_px
    assert c == pytest.approx(a, rel=0.02)


@pytest.mark.parametrize("s", [0.9, 0.98, 1.1])
def test_scaling_scales_mean(vertical, s):
    base = ridge_spacing(vertical).mean_px
    assert ridge_spacing(synth_impression(vertical, s)).mean_px == pytest.approx(s * base, rel=0.02)


@pytest.mark.parametrize("a,b", [(0.5, 60), (0.8, 10), (1.0, -20)])
def test_intensity_affine(vertical, a, b):
    base = ridge_spacing(vertical).mean_px
    px = np.clip(np.round(a * vertical.pixels.astype(float) + b), 0, 255).astype(np.uint8)
    assert ridge_spacing(GrayscaleImage(px)).mean_px == pytest.approx(base, rel=0.005)


@pytest.mark.parametrize("noise", [5, 10, 20])
def test_noise_robust(vertical, noise):
    base = ridge_spacing(vertical).mean_px
    assert ridge_spacing(synth_impression(vertical, 1.0, noise, seed=noise)).mean_px == pytest.approx(base, rel=0.02)


def test_window_order_independent(vertical, rng):
    blocks = [vertical.pixels[y : y + 64, x : x + 64] for y in range(0, 449, 32) for x in range(0, 449, 32)]
    fwd = [window_spacing(b)[0] for b in blocks]
    order = rng.permutation(len(blocks))
    shuffled = [window_spacing(blocks[i])[0] for i in order]
    assert np.mean(fwd) == pytest.approx(np.mean(shuffled), rel=1e-12)


def test_flat_window():
    assert window_spacing(np.full((64, 64), 7.0)) is None


def test_expected_spacing():
    assert expected_spacing_px(10, 0.02) == pytest.approx(9.8)
    assert expected_spacing_px(10, 0.0) == 10
    assert expected_spacing_px(9.25, 0.02) == pytest.approx(9.065)
    with pytest.raises(ValueError):
        expected_spacing_px(0)


def test_point_to_point():
    assert point_to_point_report([0.499], 0.508).reduction_pct == pytest.approx(1.8, abs=0.05)
    assert point_to_point_report([0.508] * 4, 0.508).reduction_pct == 0
    pooled = point_to_point_report(TABLE2, 0.508)
    assert pooled.mean_mm == pytest.approx(0.499, abs=1e-3)
    assert pooled.count == 6
    with pytest.raises(ValueError):
        point_to_point_report([], 0.508)


def test_reports(vertical):
    rep = ridge_spacing(vertical, expected_px=9.8)
    results = [("vertical", "optical", rep), ("vertical", "capacitive", rep)]
    csv_text = spacing_csv(results)
    lines = csv_text.splitlines()
    assert lines[0] == "pattern,reader,mean_px,std_px,expected_px,deviation_pct"
    assert lines[1].startswith("vertical,optical,9.98")
    table = spacing_table(results)
    assert "capacitive" in table.splitlines()[0] and "expected spacing: 9.80 px" in table
