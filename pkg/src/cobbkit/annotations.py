"""Spine annotations: landmark import, canonical JSON, and exclusion lists.

The canonical interchange format for one image is::

    {"imageId": ..., "width": ..., "height": ...,
     "vertebrae": [{"index": 0, "corners": [[x, y], ...4]}, ...],
     "angles": {"pt": ..., "mt": ..., "tl": ...}}   # optional

Corners are absolute pixels in (TL, TR, BL, BR) order. Raw landmark files
from annotation vendors vary in corner order and normalization, so import
goes through a configurable layout descriptor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .geometry import Point
from .landmarks import CORNER_NAMES, SPINE_VERTEBRA_COUNT, VertebraQuad

AngleTriple = tuple[float, float, float]


@dataclass
class SpineAnnotation:
    """One image's landmark quads plus optional ground-truth angles."""

    image_id: str
    width: int
    height: int
    quads: list[VertebraQuad]
    gt_angles: AngleTriple | None = None
    warnings: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        doc = {
            "imageId": self.image_id,
            "width": self.width,
            "height": self.height,
            "vertebrae": [
                {"index": q.index, "corners": [[x, y] for x, y in q.corners]}
                for q in self.quads
            ],
        }
        if self.gt_angles is not None:
            pt, mt, tl = self.gt_angles
            doc["angles"] = {"pt": pt, "mt": mt, "tl": tl}
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SpineAnnotation":
        quads = []
        for v in doc["vertebrae"]:
            corners = tuple((float(x), float(y)) for x, y in v["corners"])
            if len(corners) != 4:
                raise ValueError(
                    f"vertebra {v.get('index')} has {len(corners)} corners, expected 4"
                )
            quads.append(VertebraQuad(corners=corners, index=int(v["index"])))
        angles = doc.get("angles")
        gt = (float(angles["pt"]), float(angles["mt"]), float(angles["tl"])) if angles else None
        return cls(
            image_id=str(doc["imageId"]),
            width=int(doc["width"]),
            height=int(doc["height"]),
            quads=quads,
            gt_angles=gt,
        )


@dataclass(frozen=True)
class LandmarkLayout:
    """How a raw landmark file lays out its 4*count corner points.

    corner_order names the file's per-vertebra point order; vertebra_major
    means all four corners of a vertebra appear consecutively (corner_major
    files list corner 1 of every vertebra, then corner 2, and so on).
    Normalized coordinates are scaled by the image dimensions on import.
    """

    corner_order: tuple[str, str, str, str] = CORNER_NAMES
    vertebra_major: bool = True
    normalized: bool = False
    vertebra_count: int = SPINE_VERTEBRA_COUNT

    def __post_init__(self):
        if sorted(self.corner_order) != sorted(CORNER_NAMES):
            raise ValueError(
                f"corner_order must be a permutation of {CORNER_NAMES}, got {self.corner_order}"
            )


def parse_landmarks(
    text: str,
    *,
    image_id: str,
    width: int,
    height: int,
    layout: LandmarkLayout = LandmarkLayout(),
) -> SpineAnnotation:
    """Parse a raw landmark file into a validated annotation.

    The file carries 2 * 4 * vertebra_count decimal numbers separated by
    whitespace and/or commas, read as (x, y) pairs. Quads are re-sorted
    cranial to caudal; out-of-bounds landmarks are flagged as warnings
    rather than rejected.
    """
    tokens = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        numbers = [float(t) for t in tokens]
    except ValueError as e:
        raise ValueError(f"{image_id}: non-numeric landmark value") from e
    expected = 4 * layout.vertebra_count
    if len(numbers) % 2 != 0:
        raise ValueError(f"{image_id}: odd number of coordinates ({len(numbers)})")
    points = [(numbers[i], numbers[i + 1]) for i in range(0, len(numbers), 2)]
    if len(points) != expected:
        raise ValueError(
            f"{image_id}: expected {expected} landmark points, got {len(points)}"
        )
    if layout.normalized:
        points = [(x * width, y * height) for x, y in points]

    count = layout.vertebra_count
    grouped: list[list[Point]] = []
    if layout.vertebra_major:
        grouped = [points[4 * i : 4 * i + 4] for i in range(count)]
    else:
        grouped = [[points[j * count + i] for j in range(4)] for i in range(count)]

    slot = {name: i for i, name in enumerate(layout.corner_order)}
    quads = []
    for raw in grouped:
        corners = tuple(raw[slot[name]] for name in CORNER_NAMES)
        quads.append(VertebraQuad(corners=corners))
    quads.sort(key=lambda q: q.centroid()[1])
    quads = [q.with_index(i) for i, q in enumerate(quads)]

    warnings = []
    for q in quads:
        for name, (x, y) in zip(CORNER_NAMES, q.corners):
            if not (0 <= x <= width and 0 <= y <= height):
                warnings.append(
                    f"vertebra {q.index} corner {name} at ({x:g}, {y:g}) "
                    f"lies outside the {width}x{height} image"
                )
    return SpineAnnotation(
        image_id=image_id, width=width, height=height, quads=quads, warnings=warnings
    )


def normalize_id(image_id: str) -> str:
    """Collapse whitespace runs; comparisons stay case-sensitive."""
    return re.sub(r"\s+", " ", image_id.strip())


@dataclass(frozen=True)
class ExclusionList:
    """Image IDs withheld from evaluation because of flawed annotations."""

    image_ids: frozenset[str]

    def __contains__(self, image_id: str) -> bool:
        return normalize_id(image_id) in self.image_ids

    def __len__(self) -> int:
        return len(self.image_ids)

    @classmethod
    def from_ids(cls, ids) -> "ExclusionList":
        return cls(frozenset(normalize_id(i) for i in ids))

    @classmethod
    def from_file(cls, path: str | Path) -> "ExclusionList":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_text(cls, text: str) -> "ExclusionList":
        ids = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                ids.append(line)
        return cls.from_ids(ids)

    @classmethod
    def default(cls) -> "ExclusionList":
        text = resources.files("cobbkit").joinpath("data/excluded_images.txt").read_text("utf-8")
        return cls.from_text(text)


def apply_exclusions(ids: list[str], excl: ExclusionList) -> tuple[list[str], list[str]]:
    """Split `ids` into (kept, removed) against the exclusion list."""
    kept, removed = [], []
    for i in ids:
        (removed if i in excl else kept).append(i)
    return kept, removed
