"""Parametric synthetic spines with exactly known landmarks and angles.

Vertebra centers sit on a sine centerline; each vertebra is a rectangle
rotated to the centerline tangent, so its corners (and therefore every
endplate line) are known in closed form. The module also carries an
exhaustive pairwise-angle searcher written independently of the
production engine, giving dual-implementation evidence for the
measurement path and ground truth for rasterized test corpora.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .annotations import SpineAnnotation
from .cobb import CobbMeasurement
from .geometry import Point
from .landmarks import VertebraQuad
from .masks import InstanceMask


@dataclass(frozen=True)
class SpineParams:
    image_width: int = 256
    image_height: int = 512
    vertebra_count: int = 17
    amplitude: float = 16.0
    periods: float = 1.5
    phase: float = 0.0
    vertebra_width: float = 44.0
    vertebra_height: float = 24.0
    gap: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.vertebra_count < 1:
            raise ValueError("vertebra_count must be >= 1")
        stack = self.vertebra_count * self.vertebra_height + (self.vertebra_count - 1) * self.gap
        if stack > self.image_height:
            raise ValueError(
                f"{self.vertebra_count} vertebrae of height {self.vertebra_height} "
                f"with gap {self.gap} need {stack} px but the image is {self.image_height} px tall"
            )


def _centerline(p: SpineParams, t: float) -> tuple[Point, Point]:
    """Center position and unit tangent of the spine at parameter t."""
    cx = p.image_width / 2.0
    omega = 2.0 * math.pi * p.periods
    x = cx + p.amplitude * math.sin(omega * t + p.phase)

    stack = p.vertebra_count * p.vertebra_height + (p.vertebra_count - 1) * p.gap
    y_top = (p.image_height - stack) / 2.0 + p.vertebra_height / 2.0
    span = (p.vertebra_count - 1) * (p.vertebra_height + p.gap)
    y = y_top + t * span

    dxdt = p.amplitude * omega * math.cos(omega * t + p.phase)
    dydt = span if span > 0 else p.vertebra_height + p.gap
    norm = math.hypot(dxdt, dydt)
    return (x, y), (dxdt / norm, dydt / norm)


def generate_spine(p: SpineParams) -> SpineAnnotation:
    """Closed-form spine annotation with analytic ground-truth angles."""
    quads = []
    for i in range(p.vertebra_count):
        t = i / (p.vertebra_count - 1) if p.vertebra_count > 1 else 0.5
        (cx, cy), (tx, ty) = _centerline(p, t)
        nx, ny = ty, -tx  # points from the left edge toward the right
        hw, hh = p.vertebra_width / 2.0, p.vertebra_height / 2.0
        corners = (
            (cx - nx * hw - tx * hh, cy - ny * hw - ty * hh),  # TL
            (cx + nx * hw - tx * hh, cy + ny * hw - ty * hh),  # TR
            (cx - nx * hw + tx * hh, cy - ny * hw + ty * hh),  # BL
            (cx + nx * hw + tx * hh, cy + ny * hw + ty * hh),  # BR
        )
        for x, y in corners:
            if not (0.0 <= x <= p.image_width and 0.0 <= y <= p.image_height):
                raise ValueError(
                    f"vertebra {i} corner ({x:.1f}, {y:.1f}) falls outside the "
                    f"{p.image_width}x{p.image_height} image; shrink amplitude or sizes"
                )
        quads.append(VertebraQuad(corners=corners, score=1.0, index=i))

    annotation = SpineAnnotation(
        image_id=f"synthetic-{p.seed}",
        width=p.image_width,
        height=p.image_height,
        quads=quads,
    )
    annotation.gt_angles = analytic_cobb(annotation).angles()
    return annotation


def rasterize(a: SpineAnnotation) -> list[InstanceMask]:
    """One binary mask per quad; a pixel is on iff its center is inside."""
    out = []
    for q in a.quads:
        tl, tr, bl, br = q.corners
        ring = [tl, tr, br, bl]
        xs = [c[0] for c in ring]
        ys = [c[1] for c in ring]
        c0 = max(0, int(math.floor(min(xs) - 1)))
        c1 = min(a.width - 1, int(math.ceil(max(xs) + 1)))
        r0 = max(0, int(math.floor(min(ys) - 1)))
        r1 = min(a.height - 1, int(math.ceil(max(ys) + 1)))

        pixels = np.zeros((a.height, a.width), dtype=bool)
        if c1 >= c0 and r1 >= r0:
            cols, rows = np.meshgrid(np.arange(c0, c1 + 1), np.arange(r0, r1 + 1))
            px = cols + 0.5
            py = rows + 0.5
            inside = np.ones(px.shape, dtype=bool)
            for (x1, y1), (x2, y2) in zip(ring, ring[1:] + ring[:1]):
                inside &= (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1) >= 0.0
            pixels[rows[inside], cols[inside]] = True
        out.append(InstanceMask(pixels=pixels, score=1.0, label=f"vertebra-{q.index:02d}"))
    return out


def _fold_inclination(dx: float, dy: float) -> float:
    """Line inclination in radians, folded into [-pi/2, pi/2)."""
    phi = math.atan2(dy, dx)
    if phi >= math.pi / 2:
        phi -= math.pi
    elif phi < -math.pi / 2:
        phi += math.pi
    return phi


def _pair_angle_degrees(phi1: float, phi2: float) -> float:
    delta = abs(phi1 - phi2)
    if delta > math.pi / 2:
        delta = math.pi - delta
    return math.degrees(delta)


def analytic_cobb(a: SpineAnnotation, line_mode: str = "both") -> CobbMeasurement:
    """Exhaustive pairwise-angle search over the exact endplate lines.

    Deliberately naive O(L^2) enumeration, independent of the production
    selection: line tilts are folded inclination angles and pair angles
    their folded differences.
    """
    inclinations: list[float] = []
    for q in a.quads:
        edges = [(q.corners[0], q.corners[1]), (q.corners[2], q.corners[3])]
        if line_mode == "lower":
            edges = edges[1:]
        for (x1, y1), (x2, y2) in edges:
            if x1 == x2 and y1 == y2:
                raise ValueError(f"vertebra {q.index} has a zero-length endplate")
            inclinations.append(_fold_inclination(x2 - x1, y2 - y1))

    n = len(inclinations)
    if n < 2:
        raise ValueError(f"need at least 2 endplate lines, got {n}")

    mt, mt_pair = 0.0, (0, 1)
    for i in range(n):
        for j in range(i + 1, n):
            ang = _pair_angle_degrees(inclinations[i], inclinations[j])
            if ang > mt:
                mt, mt_pair = ang, (i, j)
    u, v = mt_pair

    pt, pt_pair = 0.0, None
    for i in range(u + 1):
        for j in range(i + 1, u + 1):
            ang = _pair_angle_degrees(inclinations[i], inclinations[j])
            if pt_pair is None or ang > pt:
                pt, pt_pair = ang, (i, j)

    tl, tl_pair = 0.0, None
    for i in range(v, n):
        for j in range(i + 1, n):
            ang = _pair_angle_degrees(inclinations[i], inclinations[j])
            if tl_pair is None or ang > tl:
                tl, tl_pair = ang, (i, j)

    return CobbMeasurement(pt=pt, mt=mt, tl=tl, pt_pair=pt_pair, mt_pair=mt_pair, tl_pair=tl_pair)
