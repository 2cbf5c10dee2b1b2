"""Dataset augmentation with landmark co-transformation.

Four transform classes are assigned to disjoint 10% slices of the image
list: small random tilts (uniform in [-5, 5] degrees), horizontal flips,
vertical flips, and histogram equalization. Landmarks always follow the
image: flips swap the affected corner labels, a vertical flip reverses
the cranial-to-caudal order and swaps the PT/TL ground-truth angles, and
rotation applies the identical rigid map to every landmark.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .annotations import SpineAnnotation
from .landmarks import VertebraQuad

TILT_RANGE_DEGREES = (-5.0, 5.0)
GROUP_FRACTION = 0.10

TRANSFORM_KINDS = ("rotate", "hflip", "vflip", "histeq")


@dataclass(frozen=True)
class Transform:
    kind: str
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ValueError(f"unknown transform {self.kind!r}, expected one of {TRANSFORM_KINDS}")


@dataclass(frozen=True)
class AugmentationPlan:
    """Disjoint per-image transform assignment, reproducible from the seed."""

    rotate: dict[str, float]  # image id -> tilt angle in degrees
    hflip: tuple[str, ...]
    vflip: tuple[str, ...]
    histeq: tuple[str, ...]
    master_seed: int

    def transform_for(self, image_id: str) -> Transform | None:
        if image_id in self.rotate:
            return Transform("rotate", self.rotate[image_id])
        if image_id in self.hflip:
            return Transform("hflip")
        if image_id in self.vflip:
            return Transform("vflip")
        if image_id in self.histeq:
            return Transform("histeq")
        return None

    def to_json_dict(self) -> dict:
        return {
            "masterSeed": self.master_seed,
            "rotate": {k: v for k, v in sorted(self.rotate.items())},
            "hflip": list(self.hflip),
            "vflip": list(self.vflip),
            "histeq": list(self.histeq),
        }


def _id_seed(master_seed: int, image_id: str) -> list[int]:
    digest = hashlib.sha256(image_id.encode("utf-8")).digest()
    return [master_seed & 0xFFFFFFFFFFFFFFFF, int.from_bytes(digest[:8], "big")]


def tilt_angle(master_seed: int, image_id: str) -> float:
    """Per-image tilt, deterministic in (master seed, image id) alone."""
    rng = np.random.default_rng(_id_seed(master_seed, image_id))
    lo, hi = TILT_RANGE_DEGREES
    return float(rng.uniform(lo, hi))


def plan_augmentation(ids: list[str], master_seed: int) -> AugmentationPlan:
    """Assign floor(10% of N) images to each transform, disjointly."""
    group = int(len(ids) * GROUP_FRACTION)
    if group == 0 and ids:
        warnings.warn(
            f"{len(ids)} images is too few for 10% augmentation groups; plan is empty",
            stacklevel=2,
        )
    rng = np.random.default_rng(master_seed)
    order = rng.permutation(len(ids))
    shuffled = [ids[i] for i in order]
    rotate_ids = shuffled[:group]
    hflip_ids = shuffled[group : 2 * group]
    vflip_ids = shuffled[2 * group : 3 * group]
    histeq_ids = shuffled[3 * group : 4 * group]
    return AugmentationPlan(
        rotate={i: tilt_angle(master_seed, i) for i in rotate_ids},
        hflip=tuple(hflip_ids),
        vflip=tuple(vflip_ids),
        histeq=tuple(histeq_ids),
        master_seed=master_seed,
    )


def histogram_equalize(image: np.ndarray) -> np.ndarray:
    """Standard 8-bit cumulative-histogram equalization."""
    img = np.asarray(image, dtype=np.uint8)
    hist = np.bincount(img.ravel(), minlength=256)
    cdf = hist.cumsum()
    nonzero = cdf[hist > 0]
    if nonzero.size == 0:
        return img.copy()
    cdf_min = int(nonzero[0])
    total = int(cdf[-1])
    if total == cdf_min:  # constant image
        return img.copy()
    lut = np.rint((cdf - cdf_min) / (total - cdf_min) * 255.0)
    lut = np.clip(lut, 0, 255).astype(np.uint8)
    return lut[img]


def rotate_point(p: tuple[float, float], center: tuple[float, float], degrees: float) -> tuple[float, float]:
    t = math.radians(degrees)
    c, s = math.cos(t), math.sin(t)
    dx, dy = p[0] - center[0], p[1] - center[1]
    return center[0] + c * dx - s * dy, center[1] + s * dx + c * dy


def rotate_image(image: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate about the image center with bilinear sampling, black fill.

    Uses the same rigid map as rotate_point, so landmarks and pixels
    stay registered; a 0-degree rotation reproduces the input exactly.
    """
    img = np.asarray(image, dtype=np.uint8)
    h, w = img.shape
    cx, cy = w / 2.0, h / 2.0
    t = math.radians(degrees)
    c, s = math.cos(t), math.sin(t)

    ys, xs = np.mgrid[0:h, 0:w]
    px = xs + 0.5 - cx
    py = ys + 0.5 - cy
    # inverse map: rotate output pixel centers by -degrees
    qx = c * px + s * py + cx - 0.5
    qy = -s * px + c * py + cy - 0.5

    x0 = np.floor(qx).astype(int)
    y0 = np.floor(qy).astype(int)
    fx = qx - x0
    fy = qy - y0

    def sample(yy, xx):
        inside = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        vals = np.zeros(yy.shape, dtype=float)
        vals[inside] = img[yy[inside], xx[inside]]
        return vals

    v00 = sample(y0, x0)
    v01 = sample(y0, x0 + 1)
    v10 = sample(y0 + 1, x0)
    v11 = sample(y0 + 1, x0 + 1)
    top = v00 * (1 - fx) + v01 * fx
    bottom = v10 * (1 - fx) + v11 * fx
    out = top * (1 - fy) + bottom * fy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def _map_quads(a: SpineAnnotation, quads: list[VertebraQuad]) -> list[VertebraQuad]:
    return [q.with_index(i) for i, q in enumerate(quads)]


def apply_transform(
    image: np.ndarray, a: SpineAnnotation, t: Transform
) -> tuple[np.ndarray, SpineAnnotation]:
    """Transform an image and co-transform its annotation."""
    h, w = image.shape
    if t.kind == "rotate":
        center = (w / 2.0, h / 2.0)
        out = rotate_image(image, t.angle)
        quads = [
            VertebraQuad(
                corners=tuple(rotate_point(p, center, t.angle) for p in q.corners),
                score=q.score,
                index=q.index,
            )
            for q in a.quads
        ]
        gt = a.gt_angles
    elif t.kind == "hflip":
        out = image[:, ::-1].copy()
        quads = [
            VertebraQuad(
                corners=(
                    (w - q.top_right[0], q.top_right[1]),
                    (w - q.top_left[0], q.top_left[1]),
                    (w - q.bottom_right[0], q.bottom_right[1]),
                    (w - q.bottom_left[0], q.bottom_left[1]),
                ),
                score=q.score,
                index=q.index,
            )
            for q in a.quads
        ]
        gt = a.gt_angles
    elif t.kind == "vflip":
        out = image[::-1, :].copy()
        flipped = [
            VertebraQuad(
                corners=(
                    (q.bottom_left[0], h - q.bottom_left[1]),
                    (q.bottom_right[0], h - q.bottom_right[1]),
                    (q.top_left[0], h - q.top_left[1]),
                    (q.top_right[0], h - q.top_right[1]),
                ),
                score=q.score,
            )
            for q in reversed(a.quads)
        ]
        quads = _map_quads(a, flipped)
        gt = None if a.gt_angles is None else (a.gt_angles[2], a.gt_angles[1], a.gt_angles[0])
    elif t.kind == "histeq":
        out = histogram_equalize(image)
        quads = list(a.quads)
        gt = a.gt_angles
    else:  # unreachable: Transform validates its kind
        raise ValueError(f"unknown transform {t.kind!r}")
    return out, SpineAnnotation(
        image_id=a.image_id, width=w, height=h, quads=quads, gt_angles=gt
    )
