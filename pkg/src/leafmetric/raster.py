"""Image ingestion: decoding scan files, grayscale reduction and cropping.

Supported inputs are lossless only (PNG and binary PGM/PPM); lossy formats
are rejected outright instead of quietly softening leaf edges.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptFile, RectOutOfBounds, UnsupportedFormat, ZeroDimension

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

# BT.601 luma weights; round-half-up keeps r=g=b pixels exactly at their value
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class RgbImage:
    """Row-major 8-bit color raster, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ValueError(f"expected (h, w, 3) uint8 array, got {p.shape} {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ZeroDimension(f"image is {p.shape[1]}x{p.shape[0]}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class GrayImage:
    """Row-major 8-bit luminance raster, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2 or p.dtype != np.uint8:
            raise ValueError(f"expected (h, w) uint8 array, got {p.shape} {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ZeroDimension(f"image is {p.shape[1]}x{p.shape[0]}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


AnyImage = Union[RgbImage, GrayImage]


@dataclass(frozen=True)
class CropRect:
    """Axis-aligned crop window; x/y are the inclusive top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise RectOutOfBounds(f"crop size {self.w}x{self.h} must be at least 1x1")
        if self.x < 0 or self.y < 0:
            raise RectOutOfBounds(f"crop origin ({self.x}, {self.y}) is negative")


def decode_image(data: bytes) -> RgbImage:
    """Decode PNG or binary PGM/PPM bytes into an RgbImage.

    Grayscale sources are expanded to r=g=b; RGBA is composited over a white
    background. Anything else raises UnsupportedFormat.
    """
    if data.startswith(PNG_MAGIC):
        return _decode_png(data)
    if data[:2] in (b"P5", b"P6") and (len(data) > 2 and data[2:3].isspace()):
        return _decode_pnm(data)
    raise UnsupportedFormat("only PNG and binary PGM/PPM inputs are supported")


def _decode_png(data: bytes) -> RgbImage:
    if len(data) < 33:
        raise CorruptFile("PNG stream shorter than its header")
    width, height = struct.unpack(">II", data[16:24])
    bit_depth, color_type = data[24], data[25]
    if width == 0 or height == 0:
        raise ZeroDimension(f"PNG declares {width}x{height}")
    if bit_depth != 8 or color_type not in (0, 2, 6):
        raise UnsupportedFormat(
            f"PNG bit depth {bit_depth} / color type {color_type}; "
            "only 8-bit gray, RGB and RGBA are supported"
        )
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise CorruptFile(f"invalid PNG stream: {exc}") from exc

    arr = np.asarray(img)
    if img.mode == "L":
        return RgbImage(np.repeat(arr[:, :, None], 3, axis=2))
    if img.mode == "RGB":
        return RgbImage(arr.copy())
    if img.mode == "RGBA":
        return RgbImage(_composite_over_white(arr))
    raise UnsupportedFormat(f"unexpected decoded mode {img.mode}")


def _composite_over_white(rgba: np.ndarray) -> np.ndarray:
    rgb = rgba[:, :, :3].astype(np.uint32)
    alpha = rgba[:, :, 3:4].astype(np.uint32)
    num = rgb * alpha + 255 * (255 - alpha)
    return ((2 * num + 255) // 510).astype(np.uint8)


def _decode_pnm(data: bytes) -> RgbImage:
    magic = data[:2]
    channels = 1 if magic == b"P5" else 3
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptFile("truncated PNM header")
        token = data[start:pos]
        if not token.isdigit():
            raise CorruptFile(f"non-numeric PNM header token {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if width == 0 or height == 0:
        raise ZeroDimension(f"PNM declares {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"PNM maxval {maxval}; only 8-bit (255) is supported")
    pos += 1  # single whitespace after maxval
    need = width * height * channels
    raw = data[pos : pos + need]
    if len(raw) < need:
        raise CorruptFile(f"PNM pixel data truncated ({len(raw)} of {need} bytes)")
    arr = np.frombuffer(raw, dtype=np.uint8)
    if channels == 1:
        gray = arr.reshape(height, width)
        return RgbImage(np.repeat(gray[:, :, None], 3, axis=2))
    return RgbImage(arr.reshape(height, width, 3).copy())


def encode_png(img: AnyImage) -> bytes:
    """Serialize an image as PNG (lossless, deterministic for a given raster)."""
    mode = "RGB" if isinstance(img, RgbImage) else "L"
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def to_grayscale(img: RgbImage) -> GrayImage:
    """Reduce color to luminance with BT.601 weights, rounding half up."""
    p = img.pixels.astype(np.float64)
    y = GRAY_WEIGHTS[0] * p[:, :, 0] + GRAY_WEIGHTS[1] * p[:, :, 1] + GRAY_WEIGHTS[2] * p[:, :, 2]
    y = np.clip(np.floor(y + 0.5), 0, 255)
    return GrayImage(y.astype(np.uint8))


def crop(img: AnyImage, rect: CropRect) -> AnyImage:
    """Return the rect window of img; output pixel (i, j) is source (x+i, y+j)."""
    if rect.x + rect.w > img.width or rect.y + rect.h > img.height:
        raise RectOutOfBounds(
            f"crop {rect} exceeds {img.width}x{img.height} source"
        )
    window = img.pixels[rect.y : rect.y + rect.h, rect.x : rect.x + rect.w].copy()
    return type(img)(window)
