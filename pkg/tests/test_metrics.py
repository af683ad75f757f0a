"""Threshold accuracy, probability-vector metrics, and calibration bins."""

import math

import numpy as np
import pytest

from boxlat import (
    Box,
    Model,
    ProductMeasure,
    calibration_bins,
    classify_accuracy,
    pair_scores,
    prob_metrics,
    sweep_threshold,
)


@pytest.fixture
def nested_model():
    """animal contains mammal contains cat; bird is disjoint from mammal."""
    m = Model(ProductMeasure.uniform(2))
    m.add("animal", Box([0.0, 0.0], [0.9, 0.9]))
    m.add("mammal", Box([0.0, 0.0], [0.5, 0.5]))
    m.add("cat", Box([0.0, 0.0], [0.2, 0.2]))
    m.add("bird", Box([0.6, 0.6], [0.2, 0.2]))
    m.add("void", Box([0.99, 0.99], [1e-300, 1e-300]))
    return m


class TestPairScores:
    def test_containment_and_disjoint(self, nested_model):
        s = pair_scores(nested_model, [("cat", "mammal"), ("cat", "bird")])
        assert s[0] == pytest.approx(1.0)
        assert s[1] == 0.0

    def test_partial_overlap(self, nested_model):
        # P(mammal | animal) = 0.25 / 0.81.
        (s,) = pair_scores(nested_model, [("animal", "mammal")])
        assert s == pytest.approx(0.25 / 0.81)

    def test_null_condition_scores_neg_inf(self, nested_model):
        (s,) = pair_scores(nested_model, [("void", "cat")])
        assert s == -math.inf


class TestClassifyAccuracy:
    PAIRS = [
        ("cat", "mammal", 1),
        ("cat", "animal", 1),
        ("mammal", "animal", 1),
        ("cat", "bird", 0),
        ("bird", "mammal", 0),
    ]

    def test_perfect_separation(self, nested_model):
        assert classify_accuracy(nested_model, self.PAIRS, 0.5) == 1.0

    def test_flipped_labels(self, nested_model):
        flipped = [(u, v, 1 - y) for (u, v, y) in self.PAIRS]
        assert classify_accuracy(nested_model, flipped, 0.5) == 0.0

    def test_zero_threshold_predicts_all_positive(self, nested_model):
        # Every finite score satisfies s >= 0, so accuracy is the positive rate.
        acc = classify_accuracy(nested_model, self.PAIRS, 0.0)
        assert acc == pytest.approx(3.0 / 5.0)

    def test_neg_inf_score_is_a_negative_prediction(self, nested_model):
        pairs = [("void", "cat", 0)]
        assert classify_accuracy(nested_model, pairs, 0.0) == 1.0

    def test_empty_pairs_rejected(self, nested_model):
        with pytest.raises(ValueError):
            classify_accuracy(nested_model, [], 0.5)


class TestSweepThreshold:
    def test_dominates_fixed_thresholds(self, nested_model):
        pairs = TestClassifyAccuracy.PAIRS
        t, acc = sweep_threshold(nested_model, pairs)
        for fixed in np.linspace(0.05, 0.95, 19):
            assert acc >= classify_accuracy(nested_model, pairs, fixed) - 1e-12
        assert acc == classify_accuracy(nested_model, pairs, t)

    def test_finds_separator(self, nested_model):
        pairs = TestClassifyAccuracy.PAIRS
        t, acc = sweep_threshold(nested_model, pairs)
        assert acc == 1.0
        assert 0.0 < t <= 1.0

    def test_all_null_scores(self, nested_model):
        t, acc = sweep_threshold(nested_model, [("void", "cat", 0), ("void", "bird", 0)])
        assert acc == 1.0


class TestProbMetrics:
    def test_identical_vectors(self):
        p = np.array([0.1, 0.4, 0.9])
        kl, r = prob_metrics(p, p)
        assert kl == 0.0
        assert r == pytest.approx(1.0)

    def test_hand_computed_kl(self):
        gold = np.array([0.5, 0.5])
        pred = np.array([0.25, 0.75])
        expect = 0.5 * math.log(0.5 / 0.25) + 0.5 * math.log(0.5 / 0.75)
        kl, _ = prob_metrics(pred, gold)
        assert kl == pytest.approx(expect, rel=1e-12)

    def test_zero_probabilities_clamped(self):
        kl, _ = prob_metrics(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert np.isfinite(kl)
        assert kl == pytest.approx(-math.log(1e-12), rel=1e-6)

    def test_pearson_affine_invariance(self):
        rng = np.random.default_rng(0)
        gold = rng.uniform(0.1, 0.9, size=50)
        pred = rng.uniform(0.1, 0.9, size=50)
        _, r1 = prob_metrics(pred, gold)
        _, r2 = prob_metrics(0.2 + 0.5 * pred, gold)
        assert r2 == pytest.approx(r1, abs=1e-12)

    def test_anticorrelated(self):
        gold = np.array([0.1, 0.2, 0.3, 0.4])
        _, r = prob_metrics(1.0 - gold, gold)
        assert r == pytest.approx(-1.0)

    def test_constant_predictions_rejected(self):
        with pytest.raises(ValueError):
            prob_metrics(np.array([0.5, 0.5]), np.array([0.2, 0.8]))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            prob_metrics(np.array([0.5]), np.array([0.5]))
        with pytest.raises(ValueError):
            prob_metrics(np.array([0.5, 0.5]), np.array([0.5, 0.5, 0.5]))


class TestCalibrationBins:
    def test_counts_partition_data(self):
        rng = np.random.default_rng(1)
        gold = rng.uniform(0, 1, size=200)
        pred = np.clip(gold + rng.normal(0, 0.05, size=200), 0, 1)
        rows = calibration_bins(pred, gold, bins=10)
        assert len(rows) == 10
        assert sum(r[2] for r in rows) == 200
        assert rows[0][0] == 0.0 and rows[-1][1] == 1.0

    def test_bin_means(self):
        gold = np.array([0.05, 0.05, 0.95, 0.95])
        pred = np.array([0.1, 0.2, 0.8, 1.0])
        rows = calibration_bins(pred, gold, bins=10)
        assert rows[0][2] == 2 and rows[0][3] == pytest.approx(0.15)
        assert rows[-1][2] == 2 and rows[-1][4] == pytest.approx(0.95)

    def test_top_bin_includes_one(self):
        rows = calibration_bins(np.array([0.9]), np.array([1.0]), bins=4)
        assert rows[-1][2] == 1

    def test_sparse_bins_have_nan_r(self):
        rows = calibration_bins(np.array([0.5]), np.array([0.5]), bins=10)
        counts = [r[2] for r in rows]
        assert sum(counts) == 1
        for r in rows:
            assert math.isnan(r[5])
