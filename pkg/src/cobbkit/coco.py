"""COCO-format annotation export and re-import.

Each vertebra quad becomes one COCO annotation: a single 8-value
segmentation polygon in TL, TR, BR, BL ring order, an axis-aligned
[x, y, w, h] bbox, and the polygon's shoelace area. IDs are assigned
deterministically in image order, then vertebra index.
"""

from __future__ import annotations

from .annotations import SpineAnnotation
from .geometry import polygon_area
from .landmarks import VertebraQuad

VERTEBRA_CATEGORY = {"id": 1, "name": "vertebra"}


def _ring(q: VertebraQuad) -> list[float]:
    tl, tr, bl, br = q.corners
    out: list[float] = []
    for x, y in (tl, tr, br, bl):
        out.extend((float(x), float(y)))
    return out


def export_coco(annotations: list[SpineAnnotation]) -> dict:
    images = []
    records = []
    ann_id = 1
    for image_idx, a in enumerate(annotations, start=1):
        images.append(
            {"id": image_idx, "file_name": a.image_id, "width": a.width, "height": a.height}
        )
        for q in a.quads:
            ring = _ring(q)
            xs, ys = ring[0::2], ring[1::2]
            x0, y0 = min(xs), min(ys)
            records.append(
                {
                    "id": ann_id,
                    "image_id": image_idx,
                    "category_id": VERTEBRA_CATEGORY["id"],
                    "segmentation": [ring],
                    "bbox": [x0, y0, max(xs) - x0, max(ys) - y0],
                    "area": polygon_area(list(zip(xs, ys))),
                    "iscrowd": 0,
                }
            )
            ann_id += 1
    return {"images": images, "annotations": records, "categories": [VERTEBRA_CATEGORY]}


def import_coco(doc: dict) -> list[SpineAnnotation]:
    """Rebuild per-image annotations from a COCO document."""
    by_image: dict[int, list[dict]] = {}
    for rec in doc["annotations"]:
        by_image.setdefault(rec["image_id"], []).append(rec)
    out = []
    for img in doc["images"]:
        quads = []
        for index, rec in enumerate(by_image.get(img["id"], [])):
            ring = rec["segmentation"][0]
            if len(ring) != 8:
                raise ValueError(
                    f"annotation {rec['id']} has a {len(ring)}-value polygon, expected 8"
                )
            tl, tr, br, bl = [(ring[i], ring[i + 1]) for i in range(0, 8, 2)]
            quads.append(VertebraQuad(corners=(tl, tr, bl, br), index=index))
        out.append(
            SpineAnnotation(
                image_id=img["file_name"],
                width=img["width"],
                height=img["height"],
                quads=quads,
            )
        )
    return out
