"""Instance-mask assembly from prototype stacks and coefficient matrices.

Masks are produced by a linear combination of k prototype images followed
by a sigmoid: M = sigmoid(P @ C^T), with P reshaped to (h*w, k). Loss
helpers mirror the training objective at evaluation scale: pixel-wise
binary cross-entropy for masks and a fixed 1 / 1.5 / 6.125 weighting of
the classification / box / mask components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

BCE_EPS = 1e-7

LOSS_WEIGHT_CLASSIFICATION = 1.0
LOSS_WEIGHT_BOX = 1.5
LOSS_WEIGHT_MASK = 6.125

DEFAULT_PROTOTYPE_COUNT = 32


@dataclass(frozen=True)
class PrototypeStack:
    """k prototype images of shape (height, width), stored as (h, w, k)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 3:
            raise ValueError(f"prototype stack must be (h, w, k), got shape {v.shape}")
        if min(v.shape) < 1:
            raise ValueError(f"prototype stack dimensions must be >= 1, got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def k(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class CoeffMatrix:
    """Per-instance prototype coefficients, shape (n, k); n may be 0."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"coefficient matrix must be (n, k), got shape {v.shape}")
        if v.shape[1] < 1:
            raise ValueError("coefficient matrix needs k >= 1")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SoftMask:
    """One assembled mask with per-pixel values in (0, 1)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"soft mask must be 2-D, got shape {v.shape}")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("soft mask values must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class InstanceMask:
    """Binary mask for one detected vertebra plus its confidence score."""

    pixels: np.ndarray
    score: float = 1.0
    label: str = ""

    def __post_init__(self):
        p = np.asarray(self.pixels)
        if p.ndim != 2:
            raise ValueError(f"instance mask must be 2-D, got shape {p.shape}")
        object.__setattr__(self, "pixels", p.astype(bool))
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class LossTriple:
    classification: float
    box: float
    mask: float

    def __add__(self, other: "LossTriple") -> "LossTriple":
        return LossTriple(
            self.classification + other.classification,
            self.box + other.box,
            self.mask + other.mask,
        )


def activate_coefficients(raw: CoeffMatrix) -> CoeffMatrix:
    """Squash raw coefficients through tanh; shape is preserved."""
    return CoeffMatrix(np.tanh(raw.values))


def assemble_masks(p: PrototypeStack, c: CoeffMatrix) -> list[SoftMask]:
    """Combine prototypes with per-instance coefficients.

    Instance i's mask is sigmoid(sum_j P[r, col, j] * C[i, j]) at every
    pixel. Returns one SoftMask per coefficient row.
    """
    if p.k != c.k:
        raise ValueError(
            f"prototype stack has k={p.k} but coefficient matrix has k={c.k}"
        )
    flat = p.values.reshape(p.height * p.width, p.k)
    logits = flat @ c.values.T  # (h*w, n)
    soft = expit(logits)
    return [
        SoftMask(soft[:, i].reshape(p.height, p.width)) for i in range(c.n)
    ]


def binarize(m: SoftMask, threshold: float = 0.5, *, score: float = 1.0, label: str = "") -> InstanceMask:
    """Threshold a soft mask; a pixel is foreground iff value > threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie strictly inside (0, 1), got {threshold}")
    return InstanceMask(pixels=m.values > threshold, score=score, label=label)


def mask_bce_loss(pred: SoftMask, truth: InstanceMask) -> float:
    """Mean pixel-wise binary cross-entropy of a soft mask against truth.

    Predictions are clamped into [BCE_EPS, 1 - BCE_EPS] before the log.
    """
    if pred.values.shape != truth.pixels.shape:
        raise ValueError(
            f"shape mismatch: prediction {pred.values.shape} vs truth {truth.pixels.shape}"
        )
    p = np.clip(pred.values, BCE_EPS, 1.0 - BCE_EPS)
    y = truth.pixels.astype(float)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def total_loss(l: LossTriple) -> float:
    """Weighted sum of the three loss components (weights 1, 1.5, 6.125)."""
    for name in ("classification", "box", "mask"):
        if getattr(l, name) < 0:
            raise ValueError(f"{name} loss must be nonnegative, got {getattr(l, name)}")
    return (
        LOSS_WEIGHT_CLASSIFICATION * l.classification
        + LOSS_WEIGHT_BOX * l.box
        + LOSS_WEIGHT_MASK * l.mask
    )
