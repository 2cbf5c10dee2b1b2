"""Cobb angle computation from vertebra landmark quads.

Endplate lines run through each quad's top and bottom corner pairs. The
angle between two lines is computed from their direction vectors as
atan2(|d1 x d2|, |d1 . d2|), which equals |arctan((m1 - m2) / (1 + m1*m2))|
for finite slopes and stays well defined for vertical or perpendicular
lines. The measurement selects the maximum pairwise angle (MT), then the
maxima strictly within the regions above and below the realizing pair
(PT and TL).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .annotations import SpineAnnotation
from .contours import extract_contour
from .geometry import Point, min_area_rect
from .landmarks import SPINE_VERTEBRA_COUNT, VertebraQuad, quad_from_rect, sort_and_prune
from .masks import InstanceMask

LINE_MODES = ("both", "lower")

_VERTICAL_DX = 1e-12


@dataclass(frozen=True)
class EndplateLine:
    """A tilted line along one vertebral endplate."""

    vertebra_index: int
    plate: str  # "top" or "bottom"
    p1: Point
    p2: Point
    direction: Point
    slope: float | None  # None marks a vertical line

    @property
    def is_vertical(self) -> bool:
        return self.slope is None


def _line(index: int, plate: str, a: Point, b: Point) -> EndplateLine:
    if b[0] < a[0] or (b[0] == a[0] and b[1] < a[1]):
        a, b = b, a
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(dx, dy)
    if length == 0.0:
        raise ValueError(
            f"degenerate {plate} endplate for vertebra {index}: coincident corners {a}"
        )
    slope = dy / dx if abs(dx) > _VERTICAL_DX else None
    return EndplateLine(
        vertebra_index=index,
        plate=plate,
        p1=a,
        p2=b,
        direction=(dx / length, dy / length),
        slope=slope,
    )


def endplate_lines(q: VertebraQuad) -> tuple[EndplateLine, EndplateLine]:
    """Top line through (TL, TR) and bottom line through (BL, BR)."""
    top = _line(q.index, "top", q.top_left, q.top_right)
    bottom = _line(q.index, "bottom", q.bottom_left, q.bottom_right)
    return top, bottom


def angle_between(l1: EndplateLine, l2: EndplateLine) -> float:
    """Unsigned angle between two lines, in degrees within [0, 90]."""
    d1x, d1y = l1.direction
    d2x, d2y = l2.direction
    cross = d1x * d2y - d1y * d2x
    dot = d1x * d2x + d1y * d2y
    return math.degrees(math.atan2(abs(cross), abs(dot)))


@dataclass(frozen=True)
class CobbMeasurement:
    """The (PT, MT, TL) triple plus the line index pairs realizing each."""

    pt: float
    mt: float
    tl: float
    pt_pair: tuple[int, int] | None
    mt_pair: tuple[int, int]
    tl_pair: tuple[int, int] | None
    shortfall: bool = False

    def angles(self) -> tuple[float, float, float]:
        return self.pt, self.mt, self.tl

    def with_shortfall(self, shortfall: bool) -> "CobbMeasurement":
        return CobbMeasurement(
            pt=self.pt, mt=self.mt, tl=self.tl,
            pt_pair=self.pt_pair, mt_pair=self.mt_pair, tl_pair=self.tl_pair,
            shortfall=shortfall,
        )


def _max_angle(lines: list[EndplateLine], lo: int, hi: int) -> tuple[float, tuple[int, int] | None]:
    """Largest pairwise angle among line indices in [lo, hi], ties most cranial."""
    best, pair = 0.0, None
    for i in range(lo, hi + 1):
        for j in range(i + 1, hi + 1):
            a = angle_between(lines[i], lines[j])
            if pair is None or a > best:
                best, pair = a, (i, j)
    return best, pair


def select_cobb_angles(lines: list[EndplateLine]) -> CobbMeasurement:
    """Pick MT as the global maximum pairwise angle, then PT above and TL below.

    `lines` must be ordered cranial to caudal (per vertebra, top plate
    before bottom). PT searches pairs wholly at or above the MT pair's
    upper line; TL searches pairs wholly at or below its lower line; a
    region with fewer than two lines contributes 0.
    """
    n = len(lines)
    if n < 2:
        raise ValueError(f"need at least 2 endplate lines, got {n}")
    mt, mt_pair = _max_angle(lines, 0, n - 1)
    assert mt_pair is not None
    u, v = mt_pair
    pt, pt_pair = (0.0, None) if u < 1 else _max_angle(lines, 0, u)
    tl, tl_pair = (0.0, None) if v > n - 2 else _max_angle(lines, v, n - 1)
    return CobbMeasurement(pt=pt, mt=mt, tl=tl, pt_pair=pt_pair, mt_pair=mt_pair, tl_pair=tl_pair)


def build_lines(quads: list[VertebraQuad], line_mode: str = "both") -> list[EndplateLine]:
    """Candidate endplate lines, cranial to caudal."""
    if line_mode not in LINE_MODES:
        raise ValueError(f"line_mode must be one of {LINE_MODES}, got {line_mode!r}")
    lines: list[EndplateLine] = []
    for q in quads:
        top, bottom = endplate_lines(q)
        if line_mode == "both":
            lines.append(top)
        lines.append(bottom)
    return lines


def measure_quads(quads: list[VertebraQuad], line_mode: str = "both") -> CobbMeasurement:
    if not quads:
        raise ValueError("cannot measure an empty set of vertebra quads")
    return select_cobb_angles(build_lines(quads, line_mode))


def measure_from_landmarks(a: SpineAnnotation, line_mode: str = "both") -> CobbMeasurement:
    """Cobb triple from an annotation's landmark quads."""
    return measure_quads(a.quads, line_mode=line_mode)


def measure_from_masks(
    masks: list[InstanceMask],
    target: int = SPINE_VERTEBRA_COUNT,
    line_mode: str = "both",
) -> CobbMeasurement:
    """Full pipeline: contours -> minimum rectangles -> quads -> Cobb triple."""
    if len(masks) < 2:
        raise ValueError(f"need at least 2 instance masks, got {len(masks)}")
    quads = [
        quad_from_rect(min_area_rect(extract_contour(m)), score=m.score) for m in masks
    ]
    detections = sort_and_prune(quads, target=target)
    return measure_quads(detections.quads, line_mode=line_mode).with_shortfall(detections.shortfall)


def measurement_record(image_id: str, m: CobbMeasurement) -> dict:
    """JSON-ready record: angles to 3 decimal places plus realizing pairs."""
    return {
        "imageId": image_id,
        "angles": {
            "pt": round(m.pt, 3),
            "mt": round(m.mt, 3),
            "tl": round(m.tl, 3),
        },
        "pairs": {
            "pt": list(m.pt_pair) if m.pt_pair else None,
            "mt": list(m.mt_pair),
            "tl": list(m.tl_pair) if m.tl_pair else None,
        },
        "shortfall": m.shortfall,
    }
