"""Angle-error metrics: SMAPE, absolute differences, and bucket reports.

SMAPE averages, over images, the ratio of summed absolute angle
differences to summed angle magnitudes, scaled to percent. Reference
scores of published methods on the same benchmark are embedded for
comparison tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

AngleTriple = tuple[float, float, float]

# Published SMAPE scores (percent) on the 609-image benchmark.
REFERENCE_SMAPE: tuple[tuple[str, float], ...] = (
    ("Revised U-Net", 16.48),
    ("ResNet", 10.81),
    ("Fast RCNN", 25.69),
    ("Multi-View Extrapolation Net", 18.95),
    ("S2VR", 37.08),
    ("BoostNet", 23.44),
    ("YOLACT", 10.76),
)

# Reference YOLACT pipeline's absolute-difference distribution (percent
# in the <5, 5-10, and 10-20 degree buckets).
REFERENCE_BUCKETS = (64.86, 29.73, 5.41)

BUCKET_EDGES = (5.0, 10.0, 20.0)
BUCKET_LABELS = ("<5 deg", "5-10 deg", "10-20 deg", ">=20 deg")


def smape(preds: list[AngleTriple], gts: list[AngleTriple]) -> float:
    """Symmetric mean absolute percentage error over paired images."""
    if len(preds) != len(gts):
        raise ValueError(f"got {len(preds)} predictions but {len(gts)} ground truths")
    if not preds:
        raise ValueError("cannot evaluate zero images")
    terms = []
    for a, b in zip(preds, gts):
        num = math.fsum(abs(ai - bi) for ai, bi in zip(a, b))
        den = math.fsum(abs(ai + bi) for ai, bi in zip(a, b))
        if den == 0.0:
            if num == 0.0:
                terms.append(0.0)
                continue
            raise ValueError("zero angle-sum denominator with nonzero difference")
        terms.append(num / den)
    return math.fsum(terms) / len(terms) * 100.0


def abs_diff(pred: AngleTriple, gt: AngleTriple) -> AngleTriple:
    """Componentwise absolute angle differences."""
    return tuple(abs(a - b) for a, b in zip(pred, gt))


def bucket_report(diffs: list[float]) -> tuple[float, float, float, float]:
    """Fractions of differences in [0,5), [5,10), [10,20), [20,inf)."""
    if not diffs:
        raise ValueError("cannot bucket zero values")
    counts = [0, 0, 0, 0]
    for d in diffs:
        if d < 0:
            raise ValueError(f"absolute differences must be nonnegative, got {d}")
        if d < BUCKET_EDGES[0]:
            counts[0] += 1
        elif d < BUCKET_EDGES[1]:
            counts[1] += 1
        elif d < BUCKET_EDGES[2]:
            counts[2] += 1
        else:
            counts[3] += 1
    n = len(diffs)
    return tuple(c / n for c in counts)


def comparison_table(
    caller_smape: float | None = None, caller_name: str = "this run"
) -> list[tuple[str, float]]:
    """Reference scores (deduplicated), ascending, plus the caller's row."""
    rows = dict(REFERENCE_SMAPE)
    if caller_smape is not None:
        rows[caller_name] = caller_smape
    return sorted(rows.items(), key=lambda kv: kv[1])


@dataclass
class EvalReport:
    n: int
    smape_percent: float
    per_image_abs_diff: list[AngleTriple]
    buckets: tuple[float, float, float, float]
    reference_scores: list[tuple[str, float]] = field(default_factory=lambda: list(REFERENCE_SMAPE))

    def to_json_dict(self) -> dict:
        return {
            "images": self.n,
            "smapePercent": self.smape_percent,
            "perImageAbsDiff": [list(d) for d in self.per_image_abs_diff],
            "buckets": {label: frac for label, frac in zip(BUCKET_LABELS, self.buckets)},
            "referenceScores": [{"method": m, "smapePercent": s} for m, s in self.reference_scores],
        }


def evaluate(preds: list[AngleTriple], gts: list[AngleTriple]) -> EvalReport:
    diffs = [abs_diff(a, b) for a, b in zip(preds, gts)]
    flat = [d for triple in diffs for d in triple]
    return EvalReport(
        n=len(preds),
        smape_percent=smape(preds, gts),
        per_image_abs_diff=diffs,
        buckets=bucket_report(flat),
    )


def report_text(report: EvalReport, caller_name: str = "this run") -> str:
    """Human-readable report table with the embedded reference footer."""
    lines = [
        f"images evaluated : {report.n}",
        f"SMAPE            : {report.smape_percent:.2f}%",
        "",
        "absolute-difference buckets:",
    ]
    for label, frac in zip(BUCKET_LABELS, report.buckets):
        lines.append(f"  {label:<10} {frac * 100:6.2f}%")
    lines.append("")
    lines.append("SMAPE comparison (reference methods, ascending):")
    for method, score in comparison_table(report.smape_percent, caller_name):
        marker = " <-" if method == caller_name else ""
        lines.append(f"  {method:<30} {score:6.2f}%{marker}")
    lines.append("")
    lines.append(
        "reference YOLACT pipeline buckets: "
        f"{REFERENCE_BUCKETS[0]:.2f} / {REFERENCE_BUCKETS[1]:.2f} / {REFERENCE_BUCKETS[2]:.2f} % "
        "(<5 / 5-10 / 10-20 deg)"
    )
    return "\n".join(lines)
