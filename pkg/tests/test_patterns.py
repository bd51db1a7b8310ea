from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from fptarget.errors import FormatError
from fptarget.patterns import GratingKind, GrayscaleImage, load_image, parse_pgm, sine_grating, synth_impression, write_pgm
from fptarget.projection import NOMINAL_PX_PER_MM


def test_vertical_extrema():
    g = sine_grating(GratingKind.VERTICAL, 10, 64, 8)
    assert g.pixels[0, 0] == 255 and g.pixels[3, 5] == 0
    assert np.all(g.pixels[:, ::10] == 255)


def test_horizontal_extrema():
    g = sine_grating("horizontal", 10, 8, 64)
    assert np.all(g.pixels[::10, :] == 255) and np.all(g.pixels[5, :] == 0)


def test_circular_dark_rings():
    g = sine_grating(GratingKind.CIRCULAR, 10, 101, 101)
    c = 50
    for r in (5, 15, 25, 35):
        assert g.pixels[c, c + r] == 0
        assert g.pixels[c - r, c] == 0
    assert g.pixels[c, c] == 255


def test_circular_rotation_invariance():
    g = sine_grating(GratingKind.CIRCULAR, 10, 101, 101).pixels
    assert np.array_equal(g, np.rot90(g))
    assert np.array_equal(g, g.T)


def test_period_in_mm():
    assert 10 / NOMINAL_PX_PER_MM == pytest.approx(0.508, abs=1e-3)


def test_grating_formula():
    g = sine_grating("vertical", 7.5, 40, 2).pixels[0].astype(int)
    x = np.arange(40)
    assert np.array_equal(g, np.round(127.5 * (1 + np.cos(2 * np.pi * x / 7.5))).astype(int))


def test_bad_period():
    with pytest.raises(ValueError):
        sine_grating("vertical", 1.5)


def test_pgm_roundtrip(tmp_path):
    g = sine_grating("circular", 10, 512, 512)
    back = load_image(write_pgm(g, tmp_path / "g.pgm"))
    assert back.pixels.size == 262144
    assert np.array_equal(back.pixels, g.pixels) and back.ppi == 500


def test_pgm_ppi_sidecar(tmp_path):
    g = GrayscaleImage(np.zeros((4, 6), np.uint8), ppi=1000)
    back = load_image(write_pgm(g, tmp_path / "hi.pgm"))
    assert back.ppi == 1000
    assert load_image(tmp_path / "hi.pgm", ppi=250).ppi == 250


def test_pgm_maxval_rejected():
    with pytest.raises(FormatError, match="maxval"):
        parse_pgm(b"P5\n2 2\n65535\n" + bytes(8))


def test_pgm_truncated():
    with pytest.raises(FormatError, match="truncated"):
        parse_pgm(b"P5\n4 4\n255\n" + bytes(10))


def test_pgm_comment_header():
    img = parse_pgm(b"P5\n# made by hand\n2 1\n255\n\x00\xff")
    assert img.pixels.tolist() == [[0, 255]]


def test_png_load(tmp_path):
    arr = (np.arange(30).reshape(5, 6) * 8).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(tmp_path / "a.png")
    assert np.array_equal(load_image(tmp_path / "a.png").pixels, arr)
    Image.fromarray(np.zeros((2, 2, 3), np.uint8)).save(tmp_path / "rgb.png")
    with pytest.raises(FormatError, match="RGB"):
        load_image(tmp_path / "rgb.png")


def test_unknown_format(tmp_path):
    (tmp_path / "x.bmp").write_bytes(b"BM....")
    with pytest.raises(FormatError):
        load_image(tmp_path / "x.bmp")


def test_synth_identity_and_determinism():
    g = sine_grating("vertical", 10, 128, 128)
    assert synth_impression(g, 1.0, 0.0) == g
    a = synth_impression(g, 0.98, 5, seed=7)
    b = synth_impression(g, 0.98, 5, seed=7)
    assert np.array_equal(a.pixels, b.pixels)
    assert not np.array_equal(a.pixels, synth_impression(g, 0.98, 5, seed=8).pixels)


def test_synth_bounds():
    g = sine_grating("vertical", 10, 16, 16)
    with pytest.raises(ValueError):
        synth_impression(g, 0.4)
    with pytest.raises(ValueError):
        synth_impression(g, 1.0, -1)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.6, 1.6), st.integers(-40, 40), st.integers(-40, 40))
def test_synth_maps_feature_radially(scale, dx, dy):
    # a single dark dot at offset (dx, dy) from the centre lands at scale*(dx, dy)
    n = 201
    c = (n - 1) / 2
    yy, xx = np.mgrid[0:n, 0:n]
    dot = 255 - 255 * np.exp(-((xx - c - dx) ** 2 + (yy - c - dy) ** 2) / (2 * 2.0**2))
    out = synth_impression(GrayscaleImage(np.round(dot).astype(np.uint8)), scale).pixels
    w = 255.0 - out
    cy = (w * yy).sum() / w.sum() - c
    cx = (w * xx).sum() / w.sum() - c
    assert abs(cx - scale * dx) <= 0.5 and abs(cy - scale * dy) <= 0.5
