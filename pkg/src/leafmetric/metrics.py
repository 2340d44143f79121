"""Pixel-to-millimetre conversion and assembly of the final leaf record.

The scale factor is dots per inch: either declared by the scanner or derived
from two clicked points on a reference object of known physical length. One
inch is exactly 25.4 mm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from .errors import DegenerateReference, EmptyMask, NonPositiveLength
from .morphology import branch_point_count, count_foreground, label_components, thin
from .segmentation import BinaryMask

MM_PER_INCH = 25.4


class CalibrationSource(Enum):
    DECLARED = "declared"
    TWO_POINT = "two_point"


@dataclass(frozen=True)
class Calibration:
    dpi: float
    source: CalibrationSource

    def __post_init__(self):
        if not (math.isfinite(self.dpi) and self.dpi > 0):
            raise ValueError(f"dpi must be positive and finite, got {self.dpi}")


@dataclass(frozen=True)
class ReferenceMeasurement:
    """Two picked pixel coordinates and the real distance between them."""

    p1: Tuple[float, float]
    p2: Tuple[float, float]
    real_length_mm: float

    def __post_init__(self):
        if tuple(self.p1) == tuple(self.p2):
            raise DegenerateReference(f"both reference points are {self.p1}")
        if not (math.isfinite(self.real_length_mm) and self.real_length_mm > 0):
            raise NonPositiveLength(f"reference length {self.real_length_mm} mm")


@dataclass(frozen=True)
class LeafMetrics:
    area_px: int
    length_px: int
    mean_width_px: float
    area_mm2: float
    length_mm: float
    width_mm: float
    component_count: int
    skeleton_branch_points: int

    def as_dict(self) -> dict:
        return {
            "area_px": self.area_px,
            "length_px": self.length_px,
            "mean_width_px": self.mean_width_px,
            "area_mm2": self.area_mm2,
            "length_mm": self.length_mm,
            "width_mm": self.width_mm,
            "component_count": self.component_count,
            "skeleton_branch_points": self.skeleton_branch_points,
        }


def dpi_from_reference(ref: ReferenceMeasurement) -> Calibration:
    """Resolution from a two-point reference: pixel distance over real inches."""
    pixel_dist = math.dist(ref.p1, ref.p2)
    return Calibration(pixel_dist / (ref.real_length_mm / MM_PER_INCH), CalibrationSource.TWO_POINT)


def px_to_mm(length_px: float, cal: Calibration) -> float:
    return length_px / cal.dpi * MM_PER_INCH


def px2_to_mm2(area_px: float, cal: Calibration) -> float:
    return area_px / (cal.dpi * cal.dpi) * (MM_PER_INCH * MM_PER_INCH)


def compute_metrics(mask: BinaryMask, cal: Calibration, skeleton: BinaryMask = None) -> LeafMetrics:
    """Measure the final mask: area by pixel count, length by skeleton count,
    mean width as their ratio, all converted through the calibration.

    Pass skeleton to reuse an already-computed thin(mask); callers that also
    render the skeleton avoid thinning twice.

    Raises EmptyMask when nothing is foreground; a silent zero record would
    poison any statistics computed downstream. A nonempty mask can still thin
    to nothing (an isolated 2x2 block erodes away completely), in which case
    length and width are reported as 0.
    """
    area_px = count_foreground(mask)
    if area_px == 0:
        raise EmptyMask("mask has no foreground; threshold or noise removal too aggressive")
    if skeleton is None:
        skeleton = thin(mask)
    length_px = count_foreground(skeleton)
    mean_width_px = area_px / length_px if length_px > 0 else 0.0
    return LeafMetrics(
        area_px=area_px,
        length_px=length_px,
        mean_width_px=mean_width_px,
        area_mm2=px2_to_mm2(area_px, cal),
        length_mm=px_to_mm(length_px, cal),
        width_mm=px_to_mm(mean_width_px, cal),
        component_count=label_components(mask).count,
        skeleton_branch_points=branch_point_count(skeleton),
    )
