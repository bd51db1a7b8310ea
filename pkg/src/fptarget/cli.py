"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 geometry/validation
failure, 3 external matcher failure.  ``FPTARGET_OUTPUT_DIR`` sets the
directory for outputs given without an explicit path and
``FPTARGET_WORKERS`` the default worker count for ``interop``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import (
    FormatError,
    FptargetError,
    GeometryError,
    MatcherError,
    MeasurementError,
    MeshError,
    StageError,
)

EXIT_OK, EXIT_USAGE, EXIT_GEOMETRY, EXIT_MATCHER = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out_path(arg, default_name: str) -> Path:
    if arg:
        return Path(arg)
    return Path(os.environ.get("FPTARGET_OUTPUT_DIR", ".")) / default_name


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 512x512, got {text!r}")
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("size must be positive")
    return w, h


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FPTARGET_WORKERS", "1")))
    except ValueError:
        return 1


def _finger_args(p):
    p.add_argument("--diameter", type=float, default=27.0, help="finger diameter in mm (default 27)")
    p.add_argument("--length", type=float, default=30.0, help="length of the cylindrical finger body in mm, tip excluded (default 30)")
    p.add_argument("--segments", type=int, default=192, help="vertices around the finger, multiple of 4 (default 192)")
    p.add_argument("--axial-segments", type=int, default=64, help="segments along the finger body (default 64)")


def _smooth_finger(args):
    from .projection import make_smooth_finger

    return make_smooth_finger(args.diameter, args.length, args.segments, args.axial_segments)


def _mold_spec(args):
    from .mold import MoldSpec

    return MoldSpec(
        shell_diameter_mm=args.shell_dia,
        height_factor=args.height_factor,
        min_wall_mm=args.min_wall,
    )


def _mold_args(p):
    p.add_argument("--shell-dia", type=float, default=34.0, help="outer shell diameter in mm (default 34)")
    p.add_argument("--height-factor", type=float, default=1.25, help="shell height over finger height, unitless (default 1.25)")
    p.add_argument("--min-wall", type=float, default=3.5, help="design minimum wall thickness in mm (default 3.5)")


# --- subcommands ------------------------------------------------------------------


def cmd_gen_pattern(args) -> int:
    from .patterns import sine_grating, write_pgm

    w, h = args.size
    img = sine_grating(args.kind, args.period, w, h, args.ppi)
    out = write_pgm(img, _out_path(args.output, f"{args.kind}_{args.period:g}px.pgm"))
    print(f"wrote {out} ({w}x{h} px, period {args.period:g} px, {args.ppi:g} ppi)")
    return EXIT_OK


def cmd_project(args) -> int:
    from .meshio import write_stl
    from .patterns import load_image
    from .projection import ScaleModel, map_image_to_surface, required_image_size, scale_for_mode

    model = ScaleModel()
    scale = scale_for_mode(args.scale_mode, model)
    print(f"scale: {scale:.2f} px/mm")
    if args.scale_mode != "nominal":
        print(f"total error: {100 * model.total_error(args.scale_mode == 'compensated+cast'):.2f}%")
    surface = _smooth_finger(args)
    image = load_image(args.image, ppi=args.ppi)
    w, h = required_image_size(surface, scale)
    print(f"image: {image.width}x{image.height} px (frontal band needs {w}x{h} px)")
    mesh = map_image_to_surface(image, surface, scale, args.ridge_height)
    out = write_stl(mesh, _out_path(args.output, "surface.stl"))
    print(f"wrote {out} ({mesh.n_faces} triangles, finger height {surface.height:g} mm)")
    return EXIT_OK


def cmd_build_mold(args) -> int:
    from .meshio import read_mesh, write_stl
    from .mold import build_mold

    surface = read_mesh(args.surface)
    height = args.finger_height if args.finger_height is not None else float(surface.vertices[:, 2].max())
    assembly = build_mold(surface, height, _mold_spec(args))
    out = Path(args.output) if args.output else _out_path(None, "")
    out.mkdir(parents=True, exist_ok=True)
    for name, mesh in assembly.halves().items():
        write_stl(mesh, out / f"{name}.stl")
        print(f"wrote {out / (name + '.stl')} ({mesh.n_faces} triangles)")
    for k, v in assembly.dimensions().items():
        print(f"{k} = {v:.6f}")
    return EXIT_OK


def cmd_build_scaffold(args) -> int:
    from .meshio import write_stl
    from .scaffold import ScaffoldSpec, build_scaffold, scaffold_dimensions

    surface = _smooth_finger(args)
    mold_spec = _mold_spec(args)
    spec = ScaffoldSpec(
        wall_mm=args.wall,
        cutout_mm=args.cutout if args.cutout is not None else args.shell_dia,
        shrink_offset_mm=args.offset,
        clearance_mm=args.clearance,
    )
    parts = build_scaffold(mold_spec, spec, surface)
    out = Path(args.output) if args.output else _out_path(None, "")
    out.mkdir(parents=True, exist_ok=True)
    for name, mesh in parts.items():
        write_stl(mesh, out / f"scaffold_{name}.stl")
        print(f"wrote {out / f'scaffold_{name}.stl'} ({mesh.n_faces} triangles)")
    for k, v in scaffold_dimensions(mold_spec, spec, surface).items():
        print(f"{k} = {v:.6f}")
    return EXIT_OK


def cmd_validate_mesh(args) -> int:
    from .meshio import read_mesh
    from .mesh import validate

    status = EXIT_OK
    for path in args.files:
        report = validate(read_mesh(path))
        print(f"[{path}]")
        print("\n".join(report.lines()))
        if not report.watertight:
            status = EXIT_GEOMETRY
    return status


def cmd_measure_ridges(args) -> int:
    from .metrology import ridge_spacing, spacing_csv, spacing_table
    from .patterns import load_image

    results = []
    for path in args.images:
        img = load_image(path, ppi=args.ppi)
        rep = ridge_spacing(img, args.window, args.step, args.expected)
        results.append((Path(path).stem, args.reader, rep))
        line = f"{path}: mean {rep.mean_px:.3f} px ({rep.mean_mm:.4f} mm), std {rep.std_px:.3f} px, {rep.window_count} windows"
        if rep.deviation_pct is not None:
            line += f", {rep.deviation_pct:+.2f}% vs expected"
        print(line)
    if len(results) > 1:
        print(spacing_table(results), end="")
    if args.output:
        from .plotting import spacing_figure

        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(spacing_csv(results))
        fig = spacing_figure(results, out.with_suffix(".png"))
        print(f"wrote {out} and {fig}")
    return EXIT_OK


def cmd_synth_impression(args) -> int:
    from .patterns import load_image, sine_grating, synth_impression, write_pgm

    if args.image:
        src = load_image(args.image, ppi=args.ppi)
    else:
        src = sine_grating(args.kind, args.period, 512, 512, args.ppi or 500.0)
    img = synth_impression(src, args.scale, args.noise, args.seed)
    out = write_pgm(img, _out_path(args.output, f"impression_s{args.scale:g}_n{args.noise:g}_seed{args.seed}.pgm"))
    print(f"wrote {out} (scale {args.scale:g}, noise std {args.noise:g}, seed {args.seed})")
    return EXIT_OK


def cmd_interop(args) -> int:
    from .interop import build_score_matrix, interop_csv, interop_table, load_impression_sets, make_matcher
    from .plotting import score_figure

    sets = load_impression_sets(args.manifest)
    matcher = make_matcher(args.matcher, args.timeout)
    matrix = build_score_matrix(sets, matcher, args.threshold, args.include_identical, args.workers)
    print(interop_table(matrix), end="")
    out = _out_path(args.output, "interop.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(interop_csv(matrix))
    fig = score_figure(matrix, out.with_suffix(".png"))
    print(f"wrote {out} and {fig}")
    return EXIT_OK


def cmd_run(args) -> int:
    from .pipeline import load_config, run_pipeline, with_output

    config = load_config(args.config)
    if args.output:
        config = with_output(config, args.output)
    elif "FPTARGET_OUTPUT_DIR" in os.environ:
        config = with_output(config, os.environ["FPTARGET_OUTPUT_DIR"])
    result = run_pipeline(config)
    print(f"scale: {result.scale_px_per_mm:.2f} px/mm")
    print(f"output: {result.output_dir}")
    print(result.manifest_csv(), end="")
    return EXIT_OK


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fptarget",
        description="Build 3D fingerprint target molds and evaluate ridge fidelity and reader interoperability. "
        "Lengths are in millimetres (mm), raster distances in pixels (px).",
        epilog="Environment: FPTARGET_OUTPUT_DIR (output directory when -o is omitted), "
        "FPTARGET_WORKERS (interop worker count).",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen-pattern", help="write a sine grating as PGM")
    p.add_argument("--kind", choices=["vertical", "horizontal", "circular"], default="circular", help="grating orientation")
    p.add_argument("--period", type=float, default=10.0, help="ridge period in px (default 10)")
    p.add_argument("--size", type=_size, default=(512, 512), help="image size WxH in px (default 512x512)")
    p.add_argument("--ppi", type=float, default=500.0, help="resolution in ppi (pixels per inch) (default 500)")
    p.add_argument("-o", "--output", help="output PGM path")
    p.set_defaults(func=cmd_gen_pattern)

    p = sub.add_parser("project", help="displace a finger surface with an image and write STL")
    p.add_argument("--image", required=True, help="input PGM/PNG image")
    p.add_argument("--ppi", type=float, default=None, help="image resolution in ppi (pixels per inch) (default: sidecar or 500)")
    p.add_argument(
        "--scale-mode",
        choices=["nominal", "compensated", "compensated+cast"],
        default="compensated",
        help="projection scale in px/mm: nominal 19.69, or shrink-compensated",
    )
    p.add_argument("--ridge-height", type=float, default=0.33, help="ridge relief height in mm (default 0.33)")
    _finger_args(p)
    p.add_argument("-o", "--output", help="output STL path")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("build-mold", help="build the two mold halves around a displaced surface")
    p.add_argument("--surface", required=True, help="displaced finger surface (STL or OBJ, base ring at z=0, tip towards +z)")
    p.add_argument("--finger-height", type=float, default=None, help="finger height in mm (default: surface max z)")
    _mold_args(p)
    p.add_argument("-o", "--output", help="output directory")
    p.set_defaults(func=cmd_build_mold)

    p = sub.add_parser("build-scaffold", help="build base, side walls and top plate with the inner surface")
    _finger_args(p)
    _mold_args(p)
    p.add_argument("--wall", type=float, default=9.0, help="scaffold wall thickness in mm (default 9)")
    p.add_argument("--cutout", type=float, default=None, help="base cutout width in mm (default: shell diameter)")
    p.add_argument("--offset", type=float, default=1.5, help="inner surface offset in mm (default 1.5)")
    p.add_argument("--clearance", type=float, default=20.0, help="gap between mold top and top plate in mm (default 20)")
    p.add_argument("-o", "--output", help="output directory")
    p.set_defaults(func=cmd_build_scaffold)

    p = sub.add_parser("validate-mesh", help="check STL/OBJ meshes; exit 2 if any is not watertight")
    p.add_argument("files", nargs="+", help="mesh files")
    p.set_defaults(func=cmd_validate_mesh)

    p = sub.add_parser("measure-ridges", help="ridge-to-ridge spacing by windowed FFT")
    p.add_argument("images", nargs="+", help="PGM/PNG images")
    p.add_argument("--window", type=int, default=64, help="window side in px (default 64)")
    p.add_argument("--step", type=int, default=32, help="window step in px (default 32)")
    p.add_argument("--expected", type=float, default=None, help="expected spacing in px")
    p.add_argument("--ppi", type=float, default=None, help="resolution in ppi (pixels per inch) (default: sidecar or 500)")
    p.add_argument("--reader", default="-", help="reader label for the report")
    p.add_argument("-o", "--output", help="CSV report path; a PNG histogram is written next to it")
    p.set_defaults(func=cmd_measure_ridges)

    p = sub.add_parser("synth-impression", help="simulate a reader capture of a pattern")
    p.add_argument("image", nargs="?", help="source image (default: 512x512 grating from --kind/--period)")
    p.add_argument("--kind", choices=["vertical", "horizontal", "circular"], default="vertical", help="grating used without an image")
    p.add_argument("--period", type=float, default=10.0, help="grating period in px used without an image (default 10)")
    p.add_argument("--ppi", type=float, default=None, help="resolution in ppi (pixels per inch) (default: sidecar or 500)")
    p.add_argument("--scale", type=float, default=1.0, help="scale factor about the image centre, unitless in [0.5, 2]")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise std in grey levels (0-255)")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("-o", "--output", help="output PGM path")
    p.set_defaults(func=cmd_synth_impression)

    p = sub.add_parser("interop", help="cross-reader genuine/imposter statistics with TAR/FAR")
    p.add_argument("--manifest", required=True, help="CSV manifest (reader_id,target_id,index,path) or set directory")
    p.add_argument("--matcher", default="builtin", help="'builtin' or 'cmd:<command>' with optional {enroll}/{probe} placeholders")
    p.add_argument("--threshold", type=float, default=49.0, help="operating threshold in matcher score units (default 49)")
    p.add_argument("--include-identical", action="store_true", help="also score an impression against itself")
    p.add_argument("--workers", type=int, default=_default_workers(), help="concurrent pair scorings (default FPTARGET_WORKERS or 1)")
    p.add_argument("--timeout", type=float, default=30.0, help="external matcher timeout per pair in seconds (default 30)")
    p.add_argument("-o", "--output", help="CSV report path; a PNG of score distributions is written next to it")
    p.set_defaults(func=cmd_interop)

    p = sub.add_parser("run", help="run the full pipeline from a key=value config file")
    p.add_argument("--config", required=True, help="pipeline config file")
    p.add_argument("-o", "--output", help="output directory (overrides output.dir)")
    p.set_defaults(func=cmd_run)
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, StageError):
        return _exit_code(exc.cause) if not isinstance(exc.cause, FormatError) else EXIT_USAGE
    if isinstance(exc, MatcherError):
        return EXIT_MATCHER
    if isinstance(exc, (GeometryError, MeshError, MeasurementError)):
        return EXIT_GEOMETRY
    return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FptargetError, ValueError, OSError) as exc:
        print(f"fptarget: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
