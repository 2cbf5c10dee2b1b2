"""Vertebra corner landmarks from rotated rectangles, plus spine assembly.

A vertebra's four landmarks are the corners of the minimum bounding
rectangle of its mask contour, held in the fixed order (top-left,
top-right, bottom-left, bottom-right): the top pair has the smaller mean
y, and within each pair the left member has the smaller x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Point, RotatedRect

SPINE_VERTEBRA_COUNT = 17

CORNER_NAMES = ("TL", "TR", "BL", "BR")


@dataclass(frozen=True)
class VertebraQuad:
    """Four ordered corner landmarks of one vertebra."""

    corners: tuple[Point, Point, Point, Point]
    score: float = 1.0
    index: int = -1

    @property
    def top_left(self) -> Point:
        return self.corners[0]

    @property
    def top_right(self) -> Point:
        return self.corners[1]

    @property
    def bottom_left(self) -> Point:
        return self.corners[2]

    @property
    def bottom_right(self) -> Point:
        return self.corners[3]

    def centroid(self) -> Point:
        xs = sum(p[0] for p in self.corners) / 4.0
        ys = sum(p[1] for p in self.corners) / 4.0
        return xs, ys

    def with_index(self, index: int) -> "VertebraQuad":
        return VertebraQuad(corners=self.corners, score=self.score, index=index)


def order_corners(points: list[Point]) -> tuple[Point, Point, Point, Point]:
    """Arrange 4 points into (TL, TR, BL, BR); ties on y broken by x."""
    if len(points) != 4:
        raise ValueError(f"expected 4 corner points, got {len(points)}")
    by_y = sorted(points, key=lambda p: (p[1], p[0]))
    top = sorted(by_y[:2], key=lambda p: p[0])
    bottom = sorted(by_y[2:], key=lambda p: p[0])
    return top[0], top[1], bottom[0], bottom[1]


def quad_from_rect(r: RotatedRect, score: float = 1.0) -> VertebraQuad:
    """Landmark quad from a rotated rectangle's corners."""
    return VertebraQuad(corners=order_corners(r.corner_points()), score=score)


@dataclass
class SpineDetections:
    """Cranial-to-caudal ordered quads plus a shortfall flag."""

    quads: list[VertebraQuad] = field(default_factory=list)
    shortfall: bool = False


def sort_and_prune(quads: list[VertebraQuad], target: int = SPINE_VERTEBRA_COUNT) -> SpineDetections:
    """Order detections cranial-to-caudal and prune extras by score.

    When more than `target` quads are present the lowest-score ones are
    dropped (score ties drop the most cranial first, matching the
    cervical false-positive pattern); fewer than `target` keeps all and
    raises the shortfall flag. Indices are reassigned after sorting.
    """
    ordered = sorted(quads, key=lambda q: q.centroid()[1])
    if len(ordered) > target:
        by_score = sorted(range(len(ordered)), key=lambda i: (ordered[i].score, i))
        drop = set(by_score[: len(ordered) - target])
        ordered = [q for i, q in enumerate(ordered) if i not in drop]
    result = [q.with_index(i) for i, q in enumerate(ordered)]
    return SpineDetections(quads=result, shortfall=len(result) < target)
