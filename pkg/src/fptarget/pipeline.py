"""End-to-end electronic fabrication: pattern -> displaced finger -> mold
halves and scaffold parts -> reports and a hashed manifest.

Configuration is flat ``section.key = value`` text, e.g.::

    # circular calibration target on the worst-case finger
    pattern.kind = circular
    pattern.period_px = 10
    finger.diameter_mm = 27
    mold.shell_diameter_mm = 34
    output.dir = out/

Unknown keys are rejected.  ``input.image`` replaces the generated grating
with an image file.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import FormatError, FptargetError, StageError
from .mesh import validate
from .meshio import stl_bytes
from .mold import MoldSpec, build_mold, min_wall_thickness
from .patterns import DEFAULT_PPI, GratingKind, GrayscaleImage, load_image, sine_grating
from .projection import (
    FingerSurface,
    ScaleModel,
    make_smooth_finger,
    map_image_to_surface,
    required_image_size,
    scale_for_mode,
)
from .scaffold import ScaffoldSpec, build_scaffold, scaffold_dimensions

# pixels added around the size the frontal band needs
GRATING_MARGIN_PX = 2


@dataclass(frozen=True)
class PipelineConfig:
    image: Path | None = None
    grating_kind: str = "circular"
    period_px: float = 10.0
    ppi: float = DEFAULT_PPI
    finger_diameter_mm: float = 27.0
    finger_length_mm: float = 30.0
    circumferential_segments: int = 192
    axial_segments: int = 64
    scale_mode: str = "compensated"
    scale: ScaleModel = field(default_factory=ScaleModel)
    ridge_height_mm: float = 0.33
    mold: MoldSpec = field(default_factory=MoldSpec)
    scaffold: ScaffoldSpec = field(default_factory=ScaffoldSpec)
    output_dir: Path = Path("fptarget-out")


def _as_path(s):
    return Path(s)


def _as_kind(s):
    return GratingKind(s).value


def _as_mode(s):
    if s not in ("nominal", "compensated", "compensated+cast"):
        raise ValueError(f"expected nominal, compensated or compensated+cast, got {s!r}")
    return s


# config key -> (container, attribute, parser)
CONFIG_KEYS: dict[str, tuple[str | None, str, object]] = {
    "input.image": (None, "image", _as_path),
    "pattern.kind": (None, "grating_kind", _as_kind),
    "pattern.period_px": (None, "period_px", float),
    "pattern.ppi": (None, "ppi", float),
    "finger.diameter_mm": (None, "finger_diameter_mm", float),
    "finger.length_mm": (None, "finger_length_mm", float),
    "finger.circumferential_segments": (None, "circumferential_segments", int),
    "finger.axial_segments": (None, "axial_segments", int),
    "projection.scale_mode": (None, "scale_mode", _as_mode),
    "projection.ridge_height_mm": (None, "ridge_height_mm", float),
    "scale.nominal_px_per_mm": ("scale", "nominal_scale", float),
    "scale.modeling_shrink": ("scale", "e_model", float),
    "scale.printing_shrink": ("scale", "e_print", float),
    "scale.casting_shrink": ("scale", "e_cast", float),
    "mold.shell_diameter_mm": ("mold", "shell_diameter_mm", float),
    "mold.height_factor": ("mold", "height_factor", float),
    "mold.min_wall_mm": ("mold", "min_wall_mm", float),
    "mold.ridge_allowance_mm": ("mold", "ridge_allowance_mm", float),
    "mold.lock_length_mm": ("mold", "lock_length_mm", float),
    "mold.lock_width_mm": ("mold", "lock_width_mm", float),
    "mold.lock_height_mm": ("mold", "lock_height_mm", float),
    "scaffold.wall_mm": ("scaffold", "wall_mm", float),
    "scaffold.cutout_mm": ("scaffold", "cutout_mm", float),
    "scaffold.shrink_offset_mm": ("scaffold", "shrink_offset_mm", float),
    "scaffold.clearance_mm": ("scaffold", "clearance_mm", float),
    "output.dir": (None, "output_dir", _as_path),
}


def parse_config(text: str, base_dir: Path | None = None) -> PipelineConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Relative paths are taken relative to ``base_dir`` when given.
    """
    top: dict = {}
    nested: dict[str, dict] = {"scale": {}, "mold": {}, "scaffold": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"config line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise FormatError(f"config line {lineno}: unknown key {key!r}")
        group, attr, conv = CONFIG_KEYS[key]
        if key == "input.image" and not value:
            top[attr] = None
            continue
        try:
            parsed = conv(value)
        except ValueError as exc:
            raise FormatError(f"config line {lineno}: bad value for {key}: {exc}") from exc
        if isinstance(parsed, Path) and base_dir is not None and not parsed.is_absolute():
            parsed = base_dir / parsed
        (top if group is None else nested[group])[attr] = parsed

    lock = nested["mold"]
    if "lock_width_mm" in lock or "lock_height_mm" in lock:
        w0, h0 = MoldSpec().lock_cross_section_mm
        lock["lock_cross_section_mm"] = (lock.pop("lock_width_mm", w0), lock.pop("lock_height_mm", h0))
    try:
        return PipelineConfig(
            scale=ScaleModel(**nested["scale"]),
            mold=MoldSpec(**nested["mold"]),
            scaffold=ScaffoldSpec(**nested["scaffold"]),
            **top,
        )
    except ValueError as exc:
        raise FormatError(f"config: {exc}") from exc


def load_config(path) -> PipelineConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def render_config(config: PipelineConfig) -> str:
    """Inverse of :func:`parse_config` (every key, explicit values)."""
    lines = []
    for key, (group, attr, _) in CONFIG_KEYS.items():
        owner = config if group is None else getattr(config, group)
        if attr in ("lock_width_mm", "lock_height_mm"):
            value = owner.lock_cross_section_mm[0 if attr == "lock_width_mm" else 1]
        else:
            value = getattr(owner, attr)
        if value is None:
            continue
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


@dataclass
class PipelineResult:
    output_dir: Path
    files: list[tuple[str, int, str]]  # (relative path, bytes, sha-256)
    dimensions: dict[str, float]
    scale_px_per_mm: float

    def manifest_csv(self) -> str:
        return manifest_csv(self.files)


def manifest_csv(files) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["path", "bytes", "sha256"])
    w.writerows(files)
    return buf.getvalue()


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (FptargetError, ValueError)) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def source_image(config: PipelineConfig, surface: FingerSurface, scale: float) -> GrayscaleImage:
    if config.image is not None:
        return load_image(config.image, ppi=None)
    w, h = required_image_size(surface, scale)
    return sine_grating(config.grating_kind, config.period_px, w + GRATING_MARGIN_PX, h + GRATING_MARGIN_PX, config.ppi)


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Build every part, validate, and write outputs plus ``manifest.csv``.

    Any failure is raised as :class:`StageError` naming the stage.  Identical
    configurations give byte-identical files.
    """
    with _Stage("pattern"):
        surface = make_smooth_finger(
            config.finger_diameter_mm,
            config.finger_length_mm,
            config.circumferential_segments,
            config.axial_segments,
        )
        scale = scale_for_mode(config.scale_mode, config.scale)
        image = source_image(config, surface, scale)
    with _Stage("projection"):
        displaced = map_image_to_surface(image, surface, scale, config.ridge_height_mm)
    with _Stage("mold"):
        assembly = build_mold(displaced, surface.height, config.mold)
    with _Stage("scaffold"):
        parts = build_scaffold(config.mold, config.scaffold, surface)

    meshes = dict(assembly.halves())
    meshes.update({f"scaffold_{k}": v for k, v in parts.items()})

    with _Stage("validation"):
        lines = []
        for name, mesh in meshes.items():
            report = validate(mesh)
            if not report.watertight:
                raise FptargetError(f"{name} is not watertight ({len(report.boundary_loops)} boundary loops)")
            lines.append(f"[{name}]")
            lines.extend(report.lines())
            lines.append("")
        validation_text = "\n".join(lines)

    dims = {
        "finger.diameter_mm": config.finger_diameter_mm,
        "finger.length_mm": config.finger_length_mm,
        "finger.height_mm": surface.height,
        "projection.nominal_px_per_mm": config.scale.nominal_scale,
        "projection.total_error_pct": 100.0 * config.scale.total_error(config.scale_mode == "compensated+cast"),
        "projection.scale_px_per_mm": scale,
        "projection.ridge_height_mm": config.ridge_height_mm,
        "projection.image_width_px": float(image.width),
        "projection.image_height_px": float(image.height),
    }
    dims.update(assembly.dimensions())
    dims["mold.min_wall_thickness_mm"] = min_wall_thickness(assembly)
    dims.update(scaffold_dimensions(config.mold, config.scaffold, surface))
    dims_text = "".join(f"{k} = {_fmt(v)}\n" for k, v in dims.items())

    with _Stage("reports"):
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        payloads = {f"{name}.stl": stl_bytes(mesh) for name, mesh in meshes.items()}
        payloads["dimensions.txt"] = dims_text.encode()
        payloads["validation.txt"] = validation_text.encode()
        files = []
        for rel, data in payloads.items():
            (out / rel).write_bytes(data)
            files.append((rel, len(data), hashlib.sha256(data).hexdigest()))
        (out / "manifest.csv").write_text(manifest_csv(files))
    return PipelineResult(out, files, dims, scale)


def with_output(config: PipelineConfig, output_dir) -> PipelineConfig:
    return replace(config, output_dir=Path(output_dir))


__all__ = [
    "CONFIG_KEYS",
    "PipelineConfig",
    "PipelineResult",
    "load_config",
    "parse_config",
    "render_config",
    "run_pipeline",
    "with_output",
]
