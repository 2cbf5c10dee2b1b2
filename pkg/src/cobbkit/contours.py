"""Outer-boundary extraction for binary instance masks.

The contour is traced along pixel-square edges ("crack following") around
the largest 8-connected foreground component, so a single foreground pixel
degenerates naturally to its 4 unit-square corners. Pixel (row r, col c)
occupies the unit square [c, c+1] x [r, r+1] in (x, y).
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import ndimage

from .geometry import Point
from .masks import InstanceMask

_EIGHT = np.ones((3, 3), dtype=int)

# Walk directions on the corner lattice as (dx, dy).
_RIGHT, _DOWN, _LEFT, _UP = (1, 0), (0, 1), (-1, 0), (0, -1)


def _left_of(d: tuple[int, int]) -> tuple[int, int]:
    return d[1], -d[0]


def _right_of(d: tuple[int, int]) -> tuple[int, int]:
    return -d[1], d[0]


def largest_component(pixels: np.ndarray, label: str = "") -> np.ndarray:
    """Boolean mask of the largest 8-connected foreground component."""
    labeled, count = ndimage.label(pixels, structure=_EIGHT)
    if count == 0:
        raise ValueError(f"no foreground in mask {label!r}")
    if count == 1:
        return pixels.astype(bool)
    sizes = ndimage.sum_labels(np.ones_like(labeled), labeled, index=range(1, count + 1))
    keep = int(np.argmax(sizes)) + 1
    warnings.warn(
        f"mask {label!r} has {count} foreground regions; keeping the largest",
        stacklevel=2,
    )
    return labeled == keep


def extract_contour(mask: InstanceMask) -> list[Point]:
    """Trace the outer boundary of the largest foreground component.

    Returns the boundary polygon's vertices (corners where the boundary
    turns) in CCW order, i.e. positive shoelace area in image
    coordinates. Raises ValueError when the mask has no foreground.
    """
    pixels = largest_component(mask.pixels, label=mask.label)
    h, w = pixels.shape

    def fg(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and bool(pixels[r, c])

    # The two pixels adjacent to `corner` on the side the walk is
    # heading, as (left-of-direction, right-of-direction). Keeping
    # foreground on the right yields positive orientation.
    def ahead(corner: tuple[int, int], d: tuple[int, int]) -> tuple[bool, bool]:
        x, y = corner
        if d == _RIGHT:
            return fg(y - 1, x), fg(y, x)
        if d == _DOWN:
            return fg(y, x), fg(y, x - 1)
        if d == _LEFT:
            return fg(y, x - 1), fg(y - 1, x - 1)
        return fg(y - 1, x - 1), fg(y - 1, x)

    rows, cols = np.nonzero(pixels)
    first = np.lexsort((cols, rows))[0]
    # Top-left corner of the topmost-then-leftmost pixel; the boundary
    # leaves it rightward along that pixel's top edge.
    start = (int(cols[first]), int(rows[first]))

    vertices: list[Point] = []
    pos, out = start, _RIGHT
    budget = 4 * (h + 2) * (w + 2)
    for _ in range(budget):
        nxt = (pos[0] + out[0], pos[1] + out[1])
        left_fg, right_fg = ahead(nxt, out)
        if left_fg:
            new_out = _left_of(out)
        elif right_fg:
            new_out = out
        else:
            new_out = _right_of(out)
        if new_out != out:
            vertices.append((float(nxt[0]), float(nxt[1])))
        pos, out = nxt, new_out
        if pos == start and out == _RIGHT:
            return vertices
    raise RuntimeError("contour walk failed to terminate")
