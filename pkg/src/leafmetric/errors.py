"""Exception types shared across the toolkit."""


class LeafMetricError(Exception):
    """Base class for all leafmetric errors."""


class UnsupportedFormat(LeafMetricError):
    """Input file is not one of the supported lossless raster formats."""


class CorruptFile(LeafMetricError):
    """Input stream is truncated or structurally invalid."""


class ZeroDimension(LeafMetricError):
    """Decoded image has a zero width or height."""


class RectOutOfBounds(LeafMetricError):
    """Crop rectangle violates its invariants against the source image."""


class DimensionMismatch(LeafMetricError):
    """Two rasters that must share dimensions do not."""


class DegenerateReference(LeafMetricError):
    """Two-point calibration picked the same point twice."""


class NonPositiveLength(LeafMetricError):
    """Reference length must be a positive number of millimetres."""


class EmptyMask(LeafMetricError):
    """No foreground survived segmentation and noise removal."""


class CalibrationMissing(LeafMetricError):
    """Measurement requested before any calibration was set."""


class ConfigError(LeafMetricError):
    """Pipeline configuration is invalid; nothing was processed."""
