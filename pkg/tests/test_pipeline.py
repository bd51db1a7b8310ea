from __future__ import annotations

import csv
import hashlib

import pytest

from fptarget.errors import FormatError, StageError
from fptarget.meshio import read_stl
from fptarget.mesh import validate
from fptarget.patterns import sine_grating, write_pgm
from fptarget.pipeline import PipelineConfig, parse_config, render_config, run_pipeline, with_output

FAST = "finger.circumferential_segments = 96\nfinger.axial_segments = 24\n"


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    return run_pipeline(PipelineConfig(output_dir=out))


def test_outputs(default_run):
    names = [f[0] for f in default_run.files]
    stls = [n for n in names if n.endswith(".stl")]
    assert len(stls) == 6
    assert {"dimensions.txt", "validation.txt"} <= set(names)
    assert (default_run.output_dir / "manifest.csv").exists()


def test_manifest_hashes_match_files(default_run):
    with open(default_run.output_dir / "manifest.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    for row in rows:
        data = (default_run.output_dir / row["path"]).read_bytes()
        assert int(row["bytes"]) == len(data)
        assert row["sha256"] == hashlib.sha256(data).hexdigest()


def test_emitted_meshes_watertight(default_run):
    for name, _, _ in default_run.files:
        if name.endswith(".stl"):
            assert validate(read_stl(default_run.output_dir / name)).watertight


def test_dimensions_report(default_run):
    text = (default_run.output_dir / "dimensions.txt").read_text()
    assert "projection.total_error_pct = 17.220000" in text
    assert "projection.scale_px_per_mm = 16.79" in text
    assert "mold.shell_diameter_mm = 34.000000" in text
    assert "mold.shell_height_mm = 54.375000" in text
    assert "scaffold.shrink_offset_mm = 1.500000" in text
    assert default_run.dimensions["mold.min_wall_thickness_mm"] == pytest.approx(3.17, abs=0.01)


def test_rerun_identical(tmp_path):
    cfg = parse_config(FAST)
    a = run_pipeline(with_output(cfg, tmp_path / "a"))
    b = run_pipeline(with_output(cfg, tmp_path / "b"))
    assert a.manifest_csv() == b.manifest_csv()


def test_oversize_finger_fails_in_mold_stage(tmp_path):
    cfg = parse_config(FAST + "finger.diameter_mm = 33\n")
    with pytest.raises(StageError) as err:
        run_pipeline(with_output(cfg, tmp_path))
    assert err.value.stage == "mold"
    assert not (tmp_path / "manifest.csv").exists()


def test_image_input(tmp_path):
    write_pgm(sine_grating("vertical", 10, 720, 870), tmp_path / "print.pgm")
    (tmp_path / "p.cfg").write_text("input.image = print.pgm\noutput.dir = out\n" + FAST)
    from fptarget.pipeline import load_config

    cfg = load_config(tmp_path / "p.cfg")
    assert cfg.image == tmp_path / "print.pgm"
    res = run_pipeline(cfg)
    assert res.output_dir == tmp_path / "out"


def test_small_image_fails_in_projection(tmp_path):
    write_pgm(sine_grating("vertical", 10, 64, 64), tmp_path / "tiny.pgm")
    cfg = parse_config(f"input.image = {tmp_path / 'tiny.pgm'}\n" + FAST)
    with pytest.raises(StageError) as err:
        run_pipeline(with_output(cfg, tmp_path / "o"))
    assert err.value.stage == "projection"


def test_config_parsing():
    cfg = parse_config("# comment\nmold.shell_diameter_mm = 36  # wider\nscaffold.cutout_mm=36\nmold.lock_width_mm = 5\n")
    assert cfg.mold.shell_diameter_mm == 36 and cfg.mold.lock_cross_section_mm == (5.0, 4.0)
    assert parse_config(render_config(cfg)) == cfg


def test_readme_config_block_parses():
    from pathlib import Path

    text = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    block = text.split("All keys with their defaults:")[1].split("```")[1]
    cfg = parse_config(block)
    assert cfg.image is None
    assert cfg.scale.nominal_scale == pytest.approx(PipelineConfig().scale.nominal_scale)
    assert cfg.mold == PipelineConfig().mold and cfg.scaffold == PipelineConfig().scaffold


def test_config_errors():
    with pytest.raises(FormatError, match="unknown key"):
        parse_config("mold.colour = red\n")
    with pytest.raises(FormatError, match="line 2"):
        parse_config("\nfinger.diameter_mm\n")
    with pytest.raises(FormatError, match="bad value"):
        parse_config("pattern.kind = spiral\n")
    with pytest.raises(FormatError):
        parse_config("mold.height_factor = 0.9\n")
