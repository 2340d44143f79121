import io

import numpy as np
import pytest
from PIL import Image

# Acceptance fixture: 300x150 black rectangle on a white 400x250 canvas.
RECT_X, RECT_Y, RECT_W, RECT_H = 50, 50, 300, 150


def rect_canvas() -> np.ndarray:
    canvas = np.full((250, 400, 3), 255, dtype=np.uint8)
    canvas[RECT_Y : RECT_Y + RECT_H, RECT_X : RECT_X + RECT_W] = 0
    return canvas


def png_bytes(arr: np.ndarray, mode: str = None) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture
def rect_image_png() -> bytes:
    return png_bytes(rect_canvas())


@pytest.fixture
def rect_image_file(tmp_path, rect_image_png):
    path = tmp_path / "rect.png"
    path.write_bytes(rect_image_png)
    return path


def random_mask(rng: np.random.Generator, max_side: int = 64) -> np.ndarray:
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    density = rng.uniform(0.2, 0.8)
    return rng.random((h, w)) < density
