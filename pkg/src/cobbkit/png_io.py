"""PNG exchange formats: 8-bit grayscale images and binary instance masks.

Masks are written as single-channel PNGs with foreground = 255 and
background = 0; on read, any nonzero sample counts as foreground.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .masks import InstanceMask


def read_grayscale(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def write_grayscale(image: np.ndarray, path: str | Path) -> None:
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"grayscale image must be 2-D, got shape {arr.shape}")
    Image.fromarray(arr.astype(np.uint8), mode="L").save(Path(path), format="PNG")


def read_mask(path: str | Path, score: float = 1.0) -> InstanceMask:
    pixels = read_grayscale(path) > 0
    return InstanceMask(pixels=pixels, score=score, label=Path(path).name)


def write_mask(mask: InstanceMask, path: str | Path) -> None:
    write_grayscale(np.where(mask.pixels, 255, 0).astype(np.uint8), path)
