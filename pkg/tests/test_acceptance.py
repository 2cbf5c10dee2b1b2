"""Acceptance suite: one test per release criterion.

Each test prints a single pass/fail line (run with ``pytest -s``) and
enforces the criterion's tolerance and runtime budget. Oracles are the
independent implementations from oracles.py and the exhaustive searcher
in cobbkit.synthetic.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from cobbkit.annotations import ExclusionList, apply_exclusions
from cobbkit.augment import plan_augmentation
from cobbkit.cobb import (
    endplate_lines,
    angle_between,
    measure_from_landmarks,
    measure_from_masks,
    measure_quads,
)
from cobbkit.coco import export_coco, import_coco
from cobbkit.evaluation import bucket_report, smape
from cobbkit.geometry import min_area_rect
from cobbkit.landmarks import VertebraQuad
from cobbkit.masks import CoeffMatrix, LossTriple, PrototypeStack, assemble_masks, total_loss
from cobbkit.splits import split_dataset
from cobbkit.synthetic import SpineParams, analytic_cobb, generate_spine, rasterize

from oracles import assemble_scalar, min_rect_area_bruteforce


@contextmanager
def criterion(number, description, budget_seconds=None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number:2d} FAIL {description}")
        raise
    elapsed = time.perf_counter() - start
    print(f"[acceptance] criterion {number:2d} PASS {description} ({elapsed:.2f} s)")
    if budget_seconds is not None:
        assert elapsed < budget_seconds, f"criterion {number} took {elapsed:.2f} s"


def line_with_slope(m):
    half = 5.0
    quad = VertebraQuad(
        corners=((-half, -1 - m * half), (half, -1 + m * half),
                 (-half, 1 - m * half), (half, 1 + m * half))
    )
    return endplate_lines(quad)[0]


def random_spine_params(rng, *, image_width=256, image_height=512, vertebra_width=44.0,
                        vertebra_height=24.0, gap=4.0, tilt_range=(2.0, 20.0)):
    count = 17
    periods = float(rng.uniform(0.6, 1.6))
    max_tilt = math.radians(float(rng.uniform(*tilt_range)))
    span = (count - 1) * (vertebra_height + gap)
    amplitude = span * math.tan(max_tilt) / (2 * math.pi * periods)
    return SpineParams(
        image_width=image_width, image_height=image_height, vertebra_count=count,
        amplitude=amplitude, periods=periods, phase=float(rng.uniform(0.0, 2 * math.pi)),
        vertebra_width=vertebra_width, vertebra_height=vertebra_height, gap=gap,
        seed=int(rng.integers(1 << 31)),
    )


def test_criterion_1_metric_fidelity():
    with criterion(1, "SMAPE fixture and zero-error behaviour", budget_seconds=1.0):
        fixture = smape([(30.0, 20.0, 10.0)], [(20.0, 20.0, 10.0)])
        assert abs(fixture - 100.0 * 10.0 / 110.0) < 1e-9
        identical = [(30.0, 20.0, 10.0), (7.0, 55.0, 13.0)]
        assert smape(identical, identical) == 0.0


def test_criterion_2_assembly_matches_scalar_oracle():
    with criterion(2, "mask assembly equals triple-loop oracle to 1e-12", budget_seconds=5.0):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            h, w, k = (int(rng.integers(1, 9)) for _ in range(3))
            n = int(rng.integers(1, 9))
            p_vals = rng.normal(0.0, 1.5, size=(h, w, k))
            c_vals = rng.normal(0.0, 1.5, size=(n, k))
            masks = assemble_masks(PrototypeStack(p_vals), CoeffMatrix(c_vals))
            expected = assemble_scalar(p_vals.tolist(), c_vals.tolist())
            for m, e in zip(masks, expected):
                assert np.max(np.abs(m.values - np.asarray(e))) < 1e-12


def test_criterion_3_loss_weighting():
    with criterion(3, "loss weights 1/1.5/6.125 and additivity"):
        assert total_loss(LossTriple(1.0, 1.0, 1.0)) == 8.625
        rng = np.random.default_rng(3)
        for _ in range(1000):
            a = LossTriple(*(float(x) for x in rng.uniform(0, 100, 3)))
            b = LossTriple(*(float(x) for x in rng.uniform(0, 100, 3)))
            lhs = total_loss(a + b)
            rhs = total_loss(a) + total_loss(b)
            assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_criterion_4_calipers_against_bruteforce():
    with criterion(4, "min-area rectangle matches orientation brute force", budget_seconds=5.0):
        rng = np.random.default_rng(4)
        for _ in range(100):
            pts = [tuple(p) for p in rng.uniform(-40.0, 40.0, size=(50, 2))]
            rect = min_area_rect(pts)
            assert abs(rect.area - min_rect_area_bruteforce(pts)) < 1e-6
            assert all(rect.contains(p, tol=1e-9) for p in pts)


def test_criterion_5_angle_formula_equivalence():
    with criterion(5, "angle engine equals slope arctan identity to 1e-9"):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 10000:
            m1, m2 = (float(x) for x in rng.standard_cauchy(2))
            denom = 1.0 + m1 * m2
            if abs(denom) < 1e-12:
                continue
            expected = abs(math.degrees(math.atan((m1 - m2) / denom)))
            got = angle_between(line_with_slope(m1), line_with_slope(m2))
            assert abs(got - expected) < 1e-9
            checked += 1
        horizontal = line_with_slope(0.0)
        vertical_quad = VertebraQuad(corners=((0, 0), (0, 4), (0, 5), (10, 5)))
        vertical = endplate_lines(vertical_quad)[0]
        assert abs(angle_between(horizontal, vertical) - 90.0) < 1e-12
        assert abs(angle_between(line_with_slope(1.0), line_with_slope(-1.0)) - 90.0) < 1e-9


def test_criterion_6_selection_matches_exhaustive_oracle():
    with criterion(6, "Cobb selection equals exhaustive enumeration on 200 spines",
                   budget_seconds=10.0):
        rng = np.random.default_rng(6)
        for _ in range(200):
            spine = generate_spine(random_spine_params(rng))
            engine = measure_from_landmarks(spine).angles()
            oracle = analytic_cobb(spine).angles()
            assert max(abs(e - o) for e, o in zip(engine, oracle)) < 1e-9


def test_criterion_7_end_to_end_geometric_accuracy():
    with criterion(7, "raster pipeline within 2 deg and 5% SMAPE on 50 spines",
                   budget_seconds=60.0):
        rng = np.random.default_rng(7)
        measured, truth = [], []
        for _ in range(50):
            params = random_spine_params(
                rng, image_width=512, image_height=1088,
                vertebra_width=84.0, vertebra_height=48.0, gap=10.0,
                tilt_range=(8.0, 18.0),
            )
            spine = generate_spine(params)
            result = measure_from_masks(rasterize(spine))
            assert not result.shortfall
            for got, want in zip(result.angles(), spine.gt_angles):
                assert abs(got - want) <= 2.0
            measured.append(result.angles())
            truth.append(spine.gt_angles)
        assert smape(measured, truth) <= 5.0


def test_criterion_8_invariance_suite():
    with criterion(8, "rotation/flip/scale invariances on 100 spines each"):
        rng = np.random.default_rng(8)
        for _ in range(100):
            spine = generate_spine(random_spine_params(rng))
            base = measure_quads(spine.quads)

            theta = float(rng.uniform(-math.pi, math.pi))
            cx, cy = (float(v) for v in rng.uniform(-200.0, 200.0, 2))
            cos_t, sin_t = math.cos(theta), math.sin(theta)

            def remap(fn):
                quads = [
                    VertebraQuad(corners=tuple(fn(p) for p in q.corners), index=q.index)
                    for q in spine.quads
                ]
                return measure_quads(quads)

            rotated = remap(
                lambda p: (cx + cos_t * (p[0] - cx) - sin_t * (p[1] - cy),
                           cy + sin_t * (p[0] - cx) + cos_t * (p[1] - cy))
            )
            assert max(abs(a - b) for a, b in zip(rotated.angles(), base.angles())) < 1e-9

            mirrored = remap(lambda p: (spine.width - p[0], p[1]))
            assert max(abs(a - b) for a, b in zip(mirrored.angles(), base.angles())) < 1e-9

            factor = float(rng.uniform(0.05, 20.0))
            scaled = remap(lambda p: (factor * p[0], factor * p[1]))
            assert max(abs(a - b) for a, b in zip(scaled.angles(), base.angles())) < 1e-9

            vquads = []
            for q in reversed(spine.quads):
                tl, tr, bl, br = q.corners
                flip = lambda p: (p[0], spine.height - p[1])
                vquads.append(VertebraQuad(corners=(flip(bl), flip(br), flip(tl), flip(tr))))
            vflipped = measure_quads([q.with_index(i) for i, q in enumerate(vquads)])
            assert abs(vflipped.mt - base.mt) < 1e-9
            assert abs(vflipped.pt - base.tl) < 1e-9
            assert abs(vflipped.tl - base.pt) < 1e-9


def test_criterion_9_data_plumbing():
    with criterion(9, "COCO round-trip, 70/15/15 split, exclusions, plan fractions"):
        rng = np.random.default_rng(9)
        spines = [generate_spine(random_spine_params(rng)) for _ in range(5)]
        doc = json.loads(json.dumps(export_coco(spines)))
        for original, back in zip(spines, import_coco(doc)):
            for q1, q2 in zip(original.quads, back.quads):
                flat1 = [v for p in q1.corners for v in p]
                flat2 = [v for p in q2.corners for v in p]
                assert max(abs(a - b) for a, b in zip(flat1, flat2)) < 1e-9

        excluded = sorted(ExclusionList.default().image_ids)
        assert len(excluded) == 11
        corpus = [f"img-{i:04d}.jpg" for i in range(609 - 11)] + excluded
        kept, removed = apply_exclusions(corpus, ExclusionList.default())
        assert len(kept) == 598 and len(removed) == 11

        split = split_dataset(corpus, seed=17)
        sizes = (len(split.train), len(split.validation), len(split.test))
        assert sizes == (426, 91, 92)
        assert split == split_dataset(corpus, seed=17)

        ids = [f"im{i:03d}" for i in range(100)]
        plan = plan_augmentation(ids, master_seed=99)
        groups = [set(plan.rotate), set(plan.hflip), set(plan.vflip), set(plan.histeq)]
        assert all(len(g) == 10 for g in groups)
        assert len(set().union(*groups)) == 40


def test_criterion_10_bucket_report():
    with criterion(10, "bucket fractions sum to one and match the hand fixture"):
        assert bucket_report([3.0, 7.0, 15.0]) == pytest.approx((1 / 3, 1 / 3, 1 / 3, 0.0))
        rng = np.random.default_rng(10)
        for _ in range(50):
            diffs = [float(d) for d in rng.uniform(0.0, 40.0, size=int(rng.integers(1, 300)))]
            fractions = bucket_report(diffs)
            assert abs(math.fsum(fractions) - 1.0) < 1e-12
            assert all(f >= 0.0 for f in fractions)
