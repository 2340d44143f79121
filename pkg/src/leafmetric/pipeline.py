"""The measurement pipeline: crop, segment, denoise, measure, convert.

Both the batch CLI and the HTTP service call through here, so identical
parameters give identical numbers no matter which front end ran them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import report as report_mod
from .errors import ConfigError, DimensionMismatch, LeafMetricError
from .metrics import (
    Calibration,
    CalibrationSource,
    LeafMetrics,
    ReferenceMeasurement,
    compute_metrics,
    dpi_from_reference,
)
from .morphology import LabeledComponents, label_components, remove_small_components, thin
from .raster import CropRect, RgbImage, crop, decode_image, encode_png, to_grayscale
from .segmentation import BackgroundPolarity, BinaryMask, HueRange, hue_range_mask, threshold_mask

OVERLAY_TINT = (255, 0, 0)

DEFAULT_THRESHOLD = 128
DEFAULT_MIN_AREA = 50


def render_overlay(img: RgbImage, mask: BinaryMask, tint: Tuple[int, int, int]) -> RgbImage:
    """Blend tint 50/50 into img wherever mask is foreground."""
    if (img.height, img.width) != (mask.height, mask.width):
        raise DimensionMismatch(
            f"image {img.width}x{img.height} vs mask {mask.width}x{mask.height}"
        )
    out = img.pixels.astype(np.uint16).copy()
    tint_arr = np.array(tint, dtype=np.uint16)
    out[mask.bits] = (out[mask.bits] + tint_arr + 1) // 2
    return RgbImage(out.astype(np.uint8))


@dataclass(frozen=True)
class SegmentationParams:
    """Everything the user tunes between loading a scan and measuring it."""

    crop: Optional[CropRect] = None
    background: BackgroundPolarity = BackgroundPolarity.WHITE
    threshold: int = DEFAULT_THRESHOLD
    min_area: int = DEFAULT_MIN_AREA
    hue: Optional[HueRange] = None

    def __post_init__(self):
        if not 0 <= self.threshold <= 255:
            raise ValueError(f"threshold {self.threshold} outside [0, 255]")
        if self.min_area < 0:
            raise ValueError(f"min_area {self.min_area} must be >= 0")


def build_mask(img: RgbImage, params: SegmentationParams) -> Tuple[RgbImage, BinaryMask, LabeledComponents]:
    """Run crop -> segment -> label -> denoise.

    Returns the cropped view, the post-noise-removal mask and the labeling of
    that final mask.
    """
    view = crop(img, params.crop) if params.crop else img
    if params.hue is not None:
        raw = hue_range_mask(view, params.hue)
    else:
        raw = threshold_mask(to_grayscale(view), params.threshold, params.background)
    mask = remove_small_components(label_components(raw), params.min_area)
    return view, mask, label_components(mask)


def measurement_warnings(components: LabeledComponents, metrics: LeafMetrics) -> List[str]:
    warnings = []
    if components.count > 1:
        warnings.append(
            f"{components.count} objects retained after noise removal; "
            "area totals all of them"
        )
    if metrics.skeleton_branch_points > 0:
        warnings.append(
            f"skeleton has {metrics.skeleton_branch_points} branch points; "
            "pixel-count length overstates a branched midline"
        )
    return warnings


def measure_image(img: RgbImage, params: SegmentationParams, cal: Calibration):
    """Measure one image. Returns (metrics, warnings, view, mask, skeleton, components)."""
    view, mask, components = build_mask(img, params)
    skeleton = thin(mask)
    metrics = compute_metrics(mask, cal, skeleton=skeleton)
    return metrics, measurement_warnings(components, metrics), view, mask, skeleton, components


@dataclass
class ImageResult:
    path: str
    metrics: Optional[LeafMetrics] = None
    warnings: List[str] = field(default_factory=list)
    component_areas: List[int] = field(default_factory=list)
    elapsed_s: float = 0.0
    error: Optional[str] = None


@dataclass
class MeasurementReport:
    version: int
    config: dict
    results: List[ImageResult]

    @property
    def all_succeeded(self) -> bool:
        return all(r.error is None for r in self.results)


@dataclass
class PipelineConfig:
    """Batch run configuration; exactly one calibration source must be set."""

    inputs: Sequence[str]
    out_dir: Optional[Path] = None
    crop: Optional[CropRect] = None
    background: BackgroundPolarity = BackgroundPolarity.WHITE
    threshold: int = DEFAULT_THRESHOLD
    min_area: int = DEFAULT_MIN_AREA
    dpi: Optional[float] = None
    reference: Optional[ReferenceMeasurement] = None
    hue: Optional[HueRange] = None
    formats: Tuple[str, ...] = ("json", "csv")
    overlay: bool = False
    figures: bool = False

    def validate(self) -> None:
        if (self.dpi is None) == (self.reference is None):
            raise ConfigError("exactly one of --dpi and --ref must be given")
        if self.dpi is not None and self.dpi <= 0:
            raise ConfigError(f"dpi must be positive, got {self.dpi}")
        if not 0 <= self.threshold <= 255:
            raise ConfigError(f"threshold {self.threshold} outside [0, 255]")
        if self.min_area < 0:
            raise ConfigError(f"min-area {self.min_area} must be >= 0")
        for fmt in self.formats:
            if fmt not in ("json", "csv"):
                raise ConfigError(f"unknown report format {fmt!r}")

    def calibration(self) -> Calibration:
        if self.dpi is not None:
            return Calibration(self.dpi, CalibrationSource.DECLARED)
        return dpi_from_reference(self.reference)

    def segmentation_params(self) -> SegmentationParams:
        return SegmentationParams(
            crop=self.crop,
            background=self.background,
            threshold=self.threshold,
            min_area=self.min_area,
            hue=self.hue,
        )

    def echo(self) -> dict:
        return {
            "crop": [self.crop.x, self.crop.y, self.crop.w, self.crop.h] if self.crop else None,
            "background": self.background.value,
            "threshold": self.threshold,
            "min_area": self.min_area,
            "dpi": self.dpi,
            "reference": (
                {
                    "p1": list(self.reference.p1),
                    "p2": list(self.reference.p2),
                    "real_length_mm": self.reference.real_length_mm,
                }
                if self.reference
                else None
            ),
            "hue": (
                {
                    "lo": self.hue.lo,
                    "hi": self.hue.hi,
                    "min_saturation": self.hue.min_saturation,
                    "min_value": self.hue.min_value,
                }
                if self.hue
                else None
            ),
        }


def run_pipeline(cfg: PipelineConfig) -> MeasurementReport:
    """Process every input image and write reports/overlays/figures to out_dir.

    Per-image failures (unreadable files, empty masks) become error records;
    configuration problems raise ConfigError before anything is touched.
    """
    cfg.validate()
    cal = cfg.calibration()
    params = cfg.segmentation_params()
    if cfg.out_dir is not None:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)

    results = []
    for path in cfg.inputs:
        t0 = time.perf_counter()
        result = ImageResult(path=str(path))
        try:
            data = Path(path).read_bytes()
            img = decode_image(data)
            metrics, warnings, view, mask, skeleton, components = measure_image(img, params, cal)
            result.metrics = metrics
            result.warnings = warnings
            result.component_areas = [components.area_of(i) for i in range(1, components.count + 1)]
            if cfg.out_dir is not None:
                stem = Path(path).stem
                if cfg.overlay:
                    overlay = render_overlay(view, mask, OVERLAY_TINT)
                    (cfg.out_dir / f"{stem}_overlay.png").write_bytes(encode_png(overlay))
                if cfg.figures:
                    from .figures import save_diagnostic_figure

                    save_diagnostic_figure(
                        view, mask, skeleton, metrics, result.warnings,
                        cfg.out_dir / f"{stem}_figure.png", title=stem,
                    )
        except (LeafMetricError, OSError) as exc:
            result.error = f"{type(exc).__name__}: {exc}"
        result.elapsed_s = time.perf_counter() - t0
        results.append(result)

    report = MeasurementReport(version=1, config=cfg.echo(), results=results)
    if cfg.out_dir is not None:
        if "json" in cfg.formats:
            report_mod.write_json(report, cfg.out_dir / "report.json")
        if "csv" in cfg.formats:
            report_mod.write_csv(report, cfg.out_dir / "report.csv")
    return report
