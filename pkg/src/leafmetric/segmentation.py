"""Pixel classification: brightness thresholding and HSV hue-range selection.

The leaf is whatever differs from the scanner background: darker than the
threshold on a white background, brighter on a black one. Hue selection is
the extension for multi-colored leaves; saturation/value gates keep the
achromatic background out of hue masks (set both to 0 for hue-only behavior).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .raster import GrayImage, RgbImage


class BackgroundPolarity(Enum):
    WHITE = "white"
    BLACK = "black"


@dataclass(frozen=True)
class BinaryMask:
    """Per-pixel leaf/background classification, shape (height, width) bool."""

    bits: np.ndarray

    def __post_init__(self):
        b = self.bits
        if b.ndim != 2 or b.dtype != np.bool_:
            raise ValueError(f"expected (h, w) bool array, got {b.shape} {b.dtype}")

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class HsvPixel:
    """Hue in degrees [0, 360), saturation and value as fractions.

    Achromatic pixels (s == 0) carry the canonical hue 0.
    """

    h: float
    s: float
    v: float


@dataclass(frozen=True)
class HueRange:
    """Hue interval in degrees; lo > hi wraps through 0 so reds stay selectable."""

    lo: float
    hi: float
    min_saturation: float = 0.15
    min_value: float = 0.15

    def __post_init__(self):
        for name in ("lo", "hi"):
            v = getattr(self, name)
            if not 0.0 <= v < 360.0:
                raise ValueError(f"{name}={v} outside [0, 360)")
        for name in ("min_saturation", "min_value"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def contains(self, h: float) -> bool:
        if self.lo <= self.hi:
            return self.lo <= h <= self.hi
        return h >= self.lo or h <= self.hi


def threshold_mask(img: GrayImage, threshold: int, bg: BackgroundPolarity) -> BinaryMask:
    """Classify pixels against a brightness threshold.

    White background: foreground iff gray < threshold. Black background:
    foreground iff gray > threshold. Both comparisons are strict, so the two
    polarities are exact duals under value inversion.
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold {threshold} outside [0, 255]")
    if bg is BackgroundPolarity.WHITE:
        return BinaryMask(img.pixels < threshold)
    return BinaryMask(img.pixels > threshold)


def rgb_to_hsv(p: Tuple[int, int, int]) -> HsvPixel:
    """Standard hexcone HSV for one 8-bit pixel."""
    r, g, b = p
    mx = max(r, g, b)
    mn = min(r, g, b)
    v = mx / 255.0
    if mx == 0:
        return HsvPixel(0.0, 0.0, 0.0)
    delta = mx - mn
    s = delta / mx
    if delta == 0:
        return HsvPixel(0.0, 0.0, v)
    if mx == r:
        h = (60.0 * (g - b) / delta) % 360.0
    elif mx == g:
        h = 60.0 * (b - r) / delta + 120.0
    else:
        h = 60.0 * (r - g) / delta + 240.0
    return HsvPixel(h % 360.0, s, v)


def _hsv_planes(pixels: np.ndarray):
    rgb = pixels.astype(np.float64)
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = mx - mn
    v = mx / 255.0
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)

    chromatic = delta > 0
    safe = np.where(chromatic, delta, 1.0)
    h_r = (60.0 * (g - b) / safe) % 360.0
    h_g = 60.0 * (b - r) / safe + 120.0
    h_b = 60.0 * (r - g) / safe + 240.0
    h = np.select([mx == r, mx == g], [h_r, h_g], default=h_b) % 360.0
    h = np.where(chromatic, h, 0.0)
    return h, s, v


def hue_range_mask(img: RgbImage, rng: HueRange) -> BinaryMask:
    """Select pixels whose hue falls inside rng and that pass both gates."""
    h, s, v = _hsv_planes(img.pixels)
    if rng.lo <= rng.hi:
        in_range = (h >= rng.lo) & (h <= rng.hi)
    else:
        in_range = (h >= rng.lo) | (h <= rng.hi)
    return BinaryMask(in_range & (s >= rng.min_saturation) & (v >= rng.min_value))
