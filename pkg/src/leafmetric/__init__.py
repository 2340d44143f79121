"""leafmetric: scanned-leaf area, length and width in millimetres."""

from .errors import (
    CalibrationMissing,
    ConfigError,
    CorruptFile,
    DegenerateReference,
    DimensionMismatch,
    EmptyMask,
    LeafMetricError,
    NonPositiveLength,
    RectOutOfBounds,
    UnsupportedFormat,
    ZeroDimension,
)
from .metrics import (
    Calibration,
    CalibrationSource,
    LeafMetrics,
    ReferenceMeasurement,
    compute_metrics,
    dpi_from_reference,
    px2_to_mm2,
    px_to_mm,
)
from .morphology import (
    LabeledComponents,
    branch_point_count,
    count_foreground,
    label_components,
    remove_small_components,
    thin,
)
from .pipeline import (
    PipelineConfig,
    SegmentationParams,
    build_mask,
    measure_image,
    render_overlay,
    run_pipeline,
)
from .raster import CropRect, GrayImage, RgbImage, crop, decode_image, encode_png, to_grayscale
from .segmentation import (
    BackgroundPolarity,
    BinaryMask,
    HsvPixel,
    HueRange,
    hue_range_mask,
    rgb_to_hsv,
    threshold_mask,
)

__version__ = "0.1.0"
