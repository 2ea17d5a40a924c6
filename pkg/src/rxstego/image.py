"""8-bit grayscale raster handling: PNG I/O, validation and quality metrics.

Images are 2-D uint8 numpy arrays throughout. PNG is the only supported
container because the embedded noise field does not survive lossy formats.
Color inputs are converted to grayscale on ingest, which is lossy by design.
"""

from __future__ import annotations

import io
import math
import os

import numpy as np
from PIL import Image

from .errors import DimensionMismatch

PSNR_INFINITE = math.inf


def ensure_gray(image) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
    return arr


def load_gray(path: str | os.PathLike) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.uint8)


def decode_gray(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.uint8)


def save_gray(path: str | os.PathLike, image: np.ndarray) -> None:
    Image.fromarray(ensure_gray(image), mode="L").save(path, format="PNG")


def png_bytes(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(ensure_gray(image), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def image_metrics(a, b) -> dict[str, float]:
    """Mean squared error and peak signal-to-noise ratio between two images.

    PSNR is reported as +inf when the images are identical (mse = 0).
    """
    a = ensure_gray(a)
    b = ensure_gray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image dimensions differ: {a.shape} vs {b.shape}")
    diff = a.astype(np.float64) - b.astype(np.float64)
    mse = float(np.mean(diff * diff))
    psnr = PSNR_INFINITE if mse == 0.0 else 10.0 * math.log10(255.0**2 / mse)
    return {"mse": mse, "psnr": psnr}
