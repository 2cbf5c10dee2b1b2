import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cobbkit.evaluation import (
    REFERENCE_SMAPE,
    abs_diff,
    bucket_report,
    comparison_table,
    evaluate,
    report_text,
    smape,
)

angle = st.floats(0.0, 90.0)
triple = st.tuples(angle, angle, angle)


class TestSmape:
    def test_identical_inputs_score_zero(self):
        triples = [(30.0, 20.0, 10.0), (5.0, 45.0, 12.0)]
        assert smape(triples, triples) == 0.0

    def test_single_image_fixture(self):
        got = smape([(30.0, 20.0, 10.0)], [(20.0, 20.0, 10.0)])
        assert got == pytest.approx(100.0 * 10.0 / 110.0, abs=1e-9)

    def test_symmetric_in_arguments(self):
        rng = np.random.default_rng(0)
        a = [tuple(t) for t in rng.uniform(0, 60, size=(20, 3))]
        b = [tuple(t) for t in rng.uniform(0, 60, size=(20, 3))]
        assert smape(a, b) == smape(b, a)

    def test_all_zero_image_contributes_zero(self):
        assert smape([(0.0, 0.0, 0.0)], [(0.0, 0.0, 0.0)]) == 0.0
        mixed = smape(
            [(0.0, 0.0, 0.0), (30.0, 20.0, 10.0)],
            [(0.0, 0.0, 0.0), (20.0, 20.0, 10.0)],
        )
        assert mixed == pytest.approx(100.0 * 10.0 / 110.0 / 2.0, abs=1e-9)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="2 .*1"):
            smape([(1.0, 1.0, 1.0), (2.0, 2.0, 2.0)], [(1.0, 1.0, 1.0)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            smape([], [])

    @given(st.lists(st.tuples(triple, triple), min_size=1, max_size=20))
    @settings(max_examples=80, deadline=None)
    def test_bounded_zero_to_hundred(self, pairs):
        preds = [p for p, _ in pairs]
        gts = [g for _, g in pairs]
        assert 0.0 <= smape(preds, gts) <= 100.0

    @given(triple, triple, st.floats(0.001, 1000.0))
    @settings(max_examples=80, deadline=None)
    def test_scale_invariant_per_image(self, a, b, c):
        base = smape([a], [b])
        scaled = smape([tuple(c * x for x in a)], [tuple(c * x for x in b)])
        assert scaled == pytest.approx(base, abs=1e-9 if base < 1 else base * 1e-9)


class TestAbsDiff:
    def test_identical(self):
        assert abs_diff((30.0, 20.0, 10.0), (30.0, 20.0, 10.0)) == (0.0, 0.0, 0.0)

    def test_componentwise(self):
        assert abs_diff((30.0, 20.0, 10.0), (25.0, 22.0, 10.0)) == (5.0, 2.0, 0.0)

    @given(triple, triple)
    @settings(max_examples=60, deadline=None)
    def test_symmetric(self, a, b):
        assert abs_diff(a, b) == abs_diff(b, a)


class TestBucketReport:
    def test_all_zero_goes_to_first_bucket(self):
        assert bucket_report([0.0, 0.0, 0.0]) == (1.0, 0.0, 0.0, 0.0)

    def test_three_seven_fifteen(self):
        assert bucket_report([3.0, 7.0, 15.0]) == pytest.approx((1 / 3, 1 / 3, 1 / 3, 0.0))

    def test_boundaries_closed_left(self):
        assert bucket_report([5.0]) == (0.0, 1.0, 0.0, 0.0)
        assert bucket_report([10.0]) == (0.0, 0.0, 1.0, 0.0)
        assert bucket_report([20.0]) == (0.0, 0.0, 0.0, 1.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            bucket_report([1.0, -0.1])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            bucket_report([])

    @given(st.lists(st.floats(0, 100), min_size=1, max_size=200))
    @settings(max_examples=80, deadline=None)
    def test_fractions_sum_to_one(self, diffs):
        fractions = bucket_report(diffs)
        assert all(f >= 0 for f in fractions)
        assert math.fsum(fractions) == pytest.approx(1.0, abs=1e-12)


class TestComparisonTable:
    def test_reference_rows_deduplicated(self):
        rows = comparison_table()
        assert len(rows) == 7
        assert rows[0] == ("YOLACT", 10.76)
        methods = [m for m, _ in rows]
        assert methods.count("Fast RCNN") == 1

    def test_rows_sorted_ascending(self):
        scores = [s for _, s in comparison_table()]
        assert scores == sorted(scores)

    def test_caller_score_ranked(self):
        rows = comparison_table(12.00)
        assert len(rows) == 8
        methods = [m for m, _ in rows]
        assert methods.index("ResNet") < methods.index("this run") < methods.index("Revised U-Net")

    def test_expected_reference_values(self):
        expected = {
            "Revised U-Net": 16.48,
            "ResNet": 10.81,
            "Fast RCNN": 25.69,
            "Multi-View Extrapolation Net": 18.95,
            "S2VR": 37.08,
            "BoostNet": 23.44,
            "YOLACT": 10.76,
        }
        assert dict(REFERENCE_SMAPE) == expected


class TestEvaluateAndReport:
    def test_report_fields(self):
        preds = [(30.0, 20.0, 10.0), (12.0, 40.0, 8.0)]
        gts = [(20.0, 20.0, 10.0), (12.0, 40.0, 8.0)]
        report = evaluate(preds, gts)
        assert report.n == 2
        assert report.smape_percent == pytest.approx(smape(preds, gts))
        assert report.per_image_abs_diff[0] == (10.0, 0.0, 0.0)
        assert math.fsum(report.buckets) == pytest.approx(1.0, abs=1e-12)

    def test_report_text_mentions_references(self):
        report = evaluate([(30.0, 20.0, 10.0)], [(20.0, 20.0, 10.0)])
        text = report_text(report)
        assert "SMAPE" in text
        assert "YOLACT" in text
        assert "64.86" in text and "29.73" in text and "5.41" in text

    def test_json_dict_round_trips(self):
        import json

        report = evaluate([(1.0, 2.0, 3.0)], [(1.0, 2.0, 3.0)])
        doc = json.loads(json.dumps(report.to_json_dict()))
        assert doc["images"] == 1
        assert doc["smapePercent"] == 0.0
        assert len(doc["referenceScores"]) == 7
