import struct

import numpy as np
import pytest

from leafmetric.errors import CorruptFile, RectOutOfBounds, UnsupportedFormat, ZeroDimension
from leafmetric.raster import (
    PNG_MAGIC,
    CropRect,
    GrayImage,
    RgbImage,
    crop,
    decode_image,
    encode_png,
    to_grayscale,
)

from conftest import png_bytes


def test_decode_png_rgb_round_trip():
    arr = np.array([[[0, 0, 0], [255, 255, 255]]], dtype=np.uint8)
    img = decode_image(png_bytes(arr))
    assert img.width == 2 and img.height == 1
    assert np.array_equal(img.pixels, arr)


def test_decode_png_gray_expands_to_rgb():
    arr = np.array([[77]], dtype=np.uint8)
    img = decode_image(png_bytes(arr, mode="L"))
    assert np.array_equal(img.pixels, np.array([[[77, 77, 77]]], dtype=np.uint8))


def test_decode_png_full_transparency_composites_to_white():
    arr = np.array([[[13, 200, 40, 0]]], dtype=np.uint8)
    img = decode_image(png_bytes(arr, mode="RGBA"))
    assert np.array_equal(img.pixels, np.array([[[255, 255, 255]]], dtype=np.uint8))


def test_decode_png_partial_alpha_over_white():
    arr = np.array([[[100, 200, 0, 128]]], dtype=np.uint8)
    img = decode_image(png_bytes(arr, mode="RGBA"))
    expected = [round(c * 128 / 255 + 255 * (1 - 128 / 255)) for c in (100, 200, 0)]
    assert img.pixels[0, 0].tolist() == expected


def test_decode_pgm_with_comment():
    data = b"P5\n# scanner output\n2 1\n255\n" + bytes([0, 255])
    img = decode_image(data)
    assert img.pixels[0, 0].tolist() == [0, 0, 0]
    assert img.pixels[0, 1].tolist() == [255, 255, 255]


def test_decode_ppm():
    data = b"P6 2 1 255\n" + bytes([10, 20, 30, 40, 50, 60])
    img = decode_image(data)
    assert img.pixels[0, 0].tolist() == [10, 20, 30]
    assert img.pixels[0, 1].tolist() == [40, 50, 60]


@pytest.mark.parametrize(
    "data",
    [
        b"",
        b"garbage that is no image",
        b"P2\n2 1\n255\n0 255\n",  # ascii PGM
        b"BM" + b"\x00" * 60,  # BMP header
    ],
)
def test_decode_rejects_unsupported(data):
    with pytest.raises(UnsupportedFormat):
        decode_image(data)


def test_decode_rejects_jpeg():
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.new("RGB", (4, 4)).save(buf, format="JPEG")
    with pytest.raises(UnsupportedFormat):
        decode_image(buf.getvalue())


def test_decode_rejects_palette_and_16bit_png():
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.new("P", (2, 2)).save(buf, format="PNG")
    with pytest.raises(UnsupportedFormat):
        decode_image(buf.getvalue())

    buf = io.BytesIO()
    Image.new("I;16", (2, 2)).save(buf, format="PNG")
    with pytest.raises(UnsupportedFormat):
        decode_image(buf.getvalue())


def test_decode_truncated_png_is_corrupt():
    data = png_bytes(np.zeros((8, 8, 3), dtype=np.uint8))
    with pytest.raises(CorruptFile):
        decode_image(data[: len(data) // 2])


def test_decode_truncated_pgm_is_corrupt():
    with pytest.raises(CorruptFile):
        decode_image(b"P5 4 4 255\n" + bytes(3))


def test_decode_zero_dimension():
    with pytest.raises(ZeroDimension):
        decode_image(b"P5 0 1 255\n")
    # handcrafted PNG header declaring width 0
    ihdr = struct.pack(">I", 13) + b"IHDR" + struct.pack(">II", 0, 1) + bytes([8, 0]) + bytes(7)
    with pytest.raises(ZeroDimension):
        decode_image(PNG_MAGIC + ihdr + bytes(16))


def test_encode_decode_round_trip():
    rng = np.random.default_rng(7)
    arr = rng.integers(0, 256, size=(23, 31, 3), dtype=np.uint8)
    img = RgbImage(arr)
    again = decode_image(encode_png(img))
    assert np.array_equal(again.pixels, arr)


def test_to_grayscale_white_black_red():
    img = RgbImage(np.array([[[255, 255, 255], [0, 0, 0], [255, 0, 0]]], dtype=np.uint8))
    gray = to_grayscale(img)
    # round(0.299 * 255) = round(76.245) = 76, checked by hand before building
    assert gray.pixels[0].tolist() == [255, 0, 76]


def test_to_grayscale_preserves_dimensions_and_neutral_values():
    values = np.arange(256, dtype=np.uint8)
    arr = np.repeat(values[None, :, None], 3, axis=2)
    gray = to_grayscale(RgbImage(arr))
    assert gray.width == 256 and gray.height == 1
    assert np.array_equal(gray.pixels[0], values)


def test_crop_identity_and_window():
    arr = np.arange(9, dtype=np.uint8).reshape(3, 3)
    img = GrayImage(arr)
    assert np.array_equal(crop(img, CropRect(0, 0, 3, 3)).pixels, arr)
    window = crop(img, CropRect(1, 1, 2, 2))
    assert window.pixels.ravel().tolist() == [4, 5, 7, 8]


def test_crop_out_of_bounds():
    img = GrayImage(np.zeros((1, 3), dtype=np.uint8))
    with pytest.raises(RectOutOfBounds):
        crop(img, CropRect(2, 0, 2, 1))
    with pytest.raises(RectOutOfBounds):
        CropRect(0, 0, 0, 1)


def test_crop_composes():
    rng = np.random.default_rng(11)
    arr = rng.integers(0, 256, size=(40, 50, 3), dtype=np.uint8)
    img = RgbImage(arr)
    for _ in range(25):
        ax = int(rng.integers(0, 20))
        ay = int(rng.integers(0, 15))
        aw = int(rng.integers(10, 50 - ax + 1))
        ah = int(rng.integers(10, 40 - ay + 1))
        a = CropRect(ax, ay, aw, ah)
        bx = int(rng.integers(0, aw - 5))
        by = int(rng.integers(0, ah - 5))
        b = CropRect(bx, by, int(rng.integers(1, aw - bx + 1)), int(rng.integers(1, ah - by + 1)))
        composed = CropRect(ax + bx, ay + by, b.w, b.h)
        assert np.array_equal(crop(crop(img, a), b).pixels, crop(img, composed).pixels)


def test_crop_works_on_rgb():
    arr = np.arange(27, dtype=np.uint8).reshape(3, 3, 3)
    out = crop(RgbImage(arr), CropRect(1, 0, 2, 2))
    assert np.array_equal(out.pixels, arr[0:2, 1:3])
