"""2D geometry primitives: convex hull, rotating calipers, polygon area.

Coordinates follow the image convention: x grows rightward, y grows
downward. "Counter-clockwise" throughout this package means positive
signed area under the shoelace formula in these axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Point = tuple[float, float]

_HALF_PI = math.pi / 2


def cross(o: Point, a: Point, b: Point) -> float:
    """Cross product of (a - o) and (b - o); positive for a CCW turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def polygon_area(points: Sequence[Point]) -> float:
    """Shoelace area of a closed polygon (vertices without repeat)."""
    n = len(points)
    acc = 0.0
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return abs(acc) / 2.0


def signed_area(points: Sequence[Point]) -> float:
    n = len(points)
    acc = 0.0
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return acc / 2.0


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Convex hull by Andrew's monotone chain.

    Returns vertices in CCW order (positive signed area) with no three
    collinear output points. Degenerate inputs yield 1- or 2-point
    "hulls": a single point for coincident inputs, the two extreme
    points for collinear inputs.
    """
    if not points:
        raise ValueError("convex hull of an empty point set")
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) == 1:
        return pts
    if len(pts) == 2:
        return pts

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return [hull[0]]
    return hull


@dataclass(frozen=True)
class RotatedRect:
    """Minimum-area style rotated rectangle.

    `angle` is the orientation (radians) of the half_width axis,
    canonicalized to [-pi/2, pi/2); a rectangle is invariant under 90
    degree relabeling, so only the angle modulo 90 degrees is geometric.
    """

    center: Point
    half_width: float
    half_height: float
    angle: float

    @property
    def area(self) -> float:
        return 4.0 * self.half_width * self.half_height

    def axes(self) -> tuple[Point, Point]:
        """Unit vectors of the width and height axes."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        return (c, s), (-s, c)

    def corner_points(self) -> list[Point]:
        """The 4 corners, in no particular order."""
        (ux, uy), (vx, vy) = self.axes()
        cx, cy = self.center
        hw, hh = self.half_width, self.half_height
        return [
            (cx + sx * hw * ux + sy * hh * vx, cy + sx * hw * uy + sy * hh * vy)
            for sx, sy in ((-1, -1), (1, -1), (-1, 1), (1, 1))
        ]

    def contains(self, p: Point, tol: float = 1e-9) -> bool:
        (ux, uy), (vx, vy) = self.axes()
        dx, dy = p[0] - self.center[0], p[1] - self.center[1]
        return (
            abs(dx * ux + dy * uy) <= self.half_width + tol
            and abs(dx * vx + dy * vy) <= self.half_height + tol
        )


def _canonical_angle(phi: float) -> float:
    """Reduce an axis direction angle modulo pi into [-pi/2, pi/2)."""
    phi = math.fmod(phi, math.pi)
    if phi < -_HALF_PI:
        phi += math.pi
    elif phi >= _HALF_PI:
        phi -= math.pi
    return phi


def min_area_rect(points: Sequence[Point]) -> RotatedRect:
    """Minimum-area enclosing rectangle via rotating calipers.

    The optimum has a side collinear with some convex-hull edge, so it
    suffices to try every hull-edge orientation. Raises ValueError for
    fewer than 3 points or an all-collinear input.
    """
    if len(points) < 3:
        raise ValueError(f"minimum-area rectangle needs >= 3 points, got {len(points)}")
    hull = convex_hull(points)
    if len(hull) < 3:
        raise ValueError("minimum-area rectangle is degenerate: all points are collinear")

    best_area = math.inf
    best: tuple[float, float, float, float, float, float] | None = None
    n = len(hull)
    for i in range(n):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % n]
        ex, ey = x1 - x0, y1 - y0
        norm = math.hypot(ex, ey)
        ux, uy = ex / norm, ey / norm
        vx, vy = -uy, ux
        us = [p[0] * ux + p[1] * uy for p in hull]
        vs = [p[0] * vx + p[1] * vy for p in hull]
        umin, umax = min(us), max(us)
        vmin, vmax = min(vs), max(vs)
        area = (umax - umin) * (vmax - vmin)
        if area < best_area:
            best_area = area
            best = (ux, uy, umin, umax, vmin, vmax)

    assert best is not None
    ux, uy, umin, umax, vmin, vmax = best
    uc, vc = (umin + umax) / 2.0, (vmin + vmax) / 2.0
    vx, vy = -uy, ux
    center = (uc * ux + vc * vx, uc * uy + vc * vy)
    half_u = (umax - umin) / 2.0
    half_v = (vmax - vmin) / 2.0

    # Reducing the edge angle modulo pi flips the axis direction at
    # most, so the u/v extents keep their roles.
    phi = _canonical_angle(math.atan2(uy, ux))
    return RotatedRect(center=center, half_width=half_u, half_height=half_v, angle=phi)
