"""Batch command line: measure scans, calibrate from a reference, serve the UI.

Exit codes: 0 all images succeeded, 1 any image failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import glob
import sys
from pathlib import Path

from .errors import ConfigError, LeafMetricError
from .metrics import ReferenceMeasurement, dpi_from_reference
from .pipeline import DEFAULT_MIN_AREA, DEFAULT_THRESHOLD, PipelineConfig, run_pipeline
from .raster import CropRect, decode_image
from .segmentation import BackgroundPolarity, HueRange

EXIT_OK = 0
EXIT_IMAGE_FAILED = 1
EXIT_CONFIG = 2


def parse_crop(text: str) -> CropRect:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"--crop wants x,y,w,h, got {text!r}")
    try:
        x, y, w, h = (int(p) for p in parts)
        return CropRect(x, y, w, h)
    except (ValueError, LeafMetricError) as exc:
        raise ConfigError(f"bad crop {text!r}: {exc}") from exc


def parse_ref(text: str) -> ReferenceMeasurement:
    parts = text.split(",")
    if len(parts) != 5:
        raise ConfigError(f"--ref wants x1,y1,x2,y2,mm, got {text!r}")
    try:
        x1, y1, x2, y2, mm = (float(p) for p in parts)
        return ReferenceMeasurement((x1, y1), (x2, y2), mm)
    except (ValueError, LeafMetricError) as exc:
        raise ConfigError(f"bad reference {text!r}: {exc}") from exc


def parse_hue(text: str) -> HueRange:
    parts = text.split(",")
    if len(parts) not in (2, 4):
        raise ConfigError(f"--hue wants lo,hi[,min-s,min-v], got {text!r}")
    try:
        values = [float(p) for p in parts]
        if len(values) == 2:
            return HueRange(values[0], values[1])
        return HueRange(values[0], values[1], values[2], values[3])
    except ValueError as exc:
        raise ConfigError(f"bad hue range {text!r}: {exc}") from exc


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def read_config_file(path: str) -> dict:
    """Flat key=value file; # starts a comment. Flags override these values."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = stripped.split("=", 1)
        values[key.strip().replace("_", "-")] = value.strip()
    return values


_CONFIG_KEYS = {
    "input", "crop", "bg", "threshold", "min-area", "dpi", "ref", "hue",
    "out", "format", "overlay", "figures",
}


def build_pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    file_values = read_config_file(args.config) if args.config else {}
    for key in file_values:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    def pick(flag_value, key: str, default=None):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return file_values[key]
        return default

    input_spec = pick(args.input, "input")
    if input_spec is None:
        raise ConfigError("--input is required")
    out_spec = pick(args.out, "out")
    if out_spec is None:
        raise ConfigError("--out is required")

    bg_spec = pick(args.bg, "bg", "white")
    try:
        background = BackgroundPolarity(str(bg_spec).lower())
    except ValueError:
        raise ConfigError(f"--bg must be white or black, got {bg_spec!r}") from None

    try:
        threshold = int(pick(args.threshold, "threshold", DEFAULT_THRESHOLD))
        min_area = int(pick(args.min_area, "min-area", DEFAULT_MIN_AREA))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    crop_spec = pick(args.crop, "crop")
    ref_spec = pick(args.ref, "ref")
    hue_spec = pick(args.hue, "hue")
    dpi_spec = pick(args.dpi, "dpi")
    try:
        dpi = float(dpi_spec) if dpi_spec is not None else None
    except ValueError as exc:
        raise ConfigError(f"bad dpi {dpi_spec!r}") from exc

    fmt = str(pick(args.format, "format", "both"))
    if fmt not in ("json", "csv", "both"):
        raise ConfigError(f"--format must be json, csv or both, got {fmt!r}")
    formats = ("json", "csv") if fmt == "both" else (fmt,)

    def pick_flag(flag_value, key: str) -> bool:
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return parse_bool(file_values[key])
        return False

    try:
        reference = parse_ref(ref_spec) if ref_spec is not None else None
    except LeafMetricError as exc:
        raise ConfigError(str(exc)) from exc

    return PipelineConfig(
        inputs=sorted(glob.glob(str(input_spec))),
        out_dir=Path(out_spec),
        crop=parse_crop(crop_spec) if crop_spec is not None else None,
        background=background,
        threshold=threshold,
        min_area=min_area,
        dpi=dpi,
        reference=reference,
        hue=parse_hue(hue_spec) if hue_spec is not None else None,
        formats=formats,
        overlay=pick_flag(args.overlay, "overlay"),
        figures=pick_flag(args.figures, "figures"),
    )


def cmd_measure(args: argparse.Namespace) -> int:
    cfg = build_pipeline_config(args)
    report = run_pipeline(cfg)
    for result in report.results:
        if result.error is not None:
            print(f"{result.path}: FAILED {result.error}", file=sys.stderr)
        else:
            m = result.metrics
            print(f"{result.path}: area {m.area_mm2:.2f} mm2, length {m.length_mm:.2f} mm, "
                  f"width {m.width_mm:.2f} mm")
    return EXIT_OK if report.all_succeeded else EXIT_IMAGE_FAILED


def cmd_calibrate(args: argparse.Namespace) -> int:
    ref = parse_ref(args.ref)
    decode_image(Path(args.input).read_bytes())  # validate the scan itself
    cal = dpi_from_reference(ref)
    print(f"{cal.dpi:.10g}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    ui_dir = args.ui_dir
    if ui_dir is None:
        candidate = Path("frontend") / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(ui_dir=ui_dir, session_timeout_s=args.session_timeout * 60.0)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leafmetric",
                                     description="Leaf area measurement from scanned images.")
    sub = parser.add_subparsers(dest="command", required=True)

    measure = sub.add_parser("measure", help="measure a batch of scans")
    measure.add_argument("--input", help="input file glob")
    measure.add_argument("--config", help="flat key=value config file; flags win")
    measure.add_argument("--crop", help="crop rectangle x,y,w,h")
    measure.add_argument("--bg", choices=["white", "black"], help="background polarity")
    measure.add_argument("--threshold", type=int, help="brightness threshold [0,255]")
    measure.add_argument("--min-area", type=int, help="drop objects smaller than this many px")
    measure.add_argument("--dpi", type=float, help="declared scanner resolution")
    measure.add_argument("--ref", help="two-point reference x1,y1,x2,y2,mm")
    measure.add_argument("--hue", help="hue selection lo,hi[,min-s,min-v]")
    measure.add_argument("--out", help="output directory for reports")
    measure.add_argument("--format", choices=["json", "csv", "both"], help="report formats")
    measure.add_argument("--overlay", action=argparse.BooleanOptionalAction,
                         help="write mask overlay PNGs")
    measure.add_argument("--figures", action=argparse.BooleanOptionalAction,
                         help="write diagnostic figure PNGs")
    measure.set_defaults(func=cmd_measure)

    calibrate = sub.add_parser("calibrate", help="print dpi from a two-point reference")
    calibrate.add_argument("--input", required=True, help="scan containing the reference object")
    calibrate.add_argument("--ref", required=True, help="x1,y1,x2,y2,mm")
    calibrate.set_defaults(func=cmd_calibrate)

    serve = sub.add_parser("serve", help="run the local measurement service + web UI")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8077)
    serve.add_argument("--ui-dir", help="directory with the built web UI (default: frontend/dist)")
    serve.add_argument("--session-timeout", type=float, default=30.0,
                       help="idle session eviction, minutes")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LeafMetricError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IMAGE_FAILED


if __name__ == "__main__":
    sys.exit(main())
