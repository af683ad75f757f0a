"""Evaluation metrics: thresholded accuracy, Bernoulli KL, Pearson R."""

from __future__ import annotations

import numpy as np

from .errors import NullEvidence
from .model import Model
from .queries import conditional

PROB_CLAMP = 1e-12


def pair_scores(model: Model, pairs) -> np.ndarray:
    """P(v|u) per (u, v, *) pair; -inf when u has zero probability."""
    out = np.empty(len(pairs))
    for i, p in enumerate(pairs):
        u, v = p[0], p[1]
        try:
            out[i] = conditional(model, v, [u])
        except NullEvidence:
            out[i] = -np.inf
    return out


def classify_accuracy(model: Model, pairs, threshold: float) -> float:
    """Fraction of (u, v, label) pairs with [P(v|u) >= t] matching label."""
    if not len(pairs):
        raise ValueError("need at least one pair")
    scores = pair_scores(model, pairs)
    labels = np.array([bool(p[2]) for p in pairs])
    return float(np.mean((scores >= threshold) == labels))


def sweep_threshold(model: Model, pairs):
    """Best (threshold, accuracy) over a 200-point grid of observed scores.

    Accuracy ties resolve to the smaller threshold.
    """
    if not len(pairs):
        raise ValueError("need at least one pair")
    scores = pair_scores(model, pairs)
    labels = np.array([bool(p[2]) for p in pairs])
    finite = scores[np.isfinite(scores)]
    if finite.size == 0:
        return 0.0, float(np.mean(~labels))
    grid = np.linspace(finite.min(), finite.max(), 200)
    acc = np.mean((scores[None, :] >= grid[:, None]) == labels[None, :], axis=1)
    best = int(np.argmax(acc))
    return float(grid[best]), float(acc[best])


def prob_metrics(predicted, gold):
    """(mean Bernoulli KL of gold from predicted, Pearson R).

    Both probability vectors are clamped to [1e-12, 1 - 1e-12] inside the
    KL; Pearson is undefined (raises) for a constant predicted vector.
    """
    predicted = np.asarray(predicted, dtype=float)
    gold = np.asarray(gold, dtype=float)
    if predicted.shape != gold.shape or predicted.ndim != 1 or predicted.size < 2:
        raise ValueError("need two equal-length vectors of at least 2 entries")
    p = np.clip(gold, PROB_CLAMP, 1.0 - PROB_CLAMP)
    q = np.clip(predicted, PROB_CLAMP, 1.0 - PROB_CLAMP)
    kl = float(np.mean(p * np.log(p / q) + (1.0 - p) * np.log((1.0 - p) / (1.0 - q))))
    if np.all(predicted == predicted[0]):
        raise ValueError("Pearson correlation undefined for constant predictions")
    with np.errstate(invalid="ignore", divide="ignore"):  # constant gold -> NaN
        r = float(np.corrcoef(predicted, gold)[0, 1])
    return kl, r


def calibration_bins(predicted, gold, bins=10):
    """Per-gold-probability-bin rows (lo, hi, count, mean_pred, mean_gold, R).

    R is NaN for bins with fewer than two points or constant predictions.
    """
    predicted = np.asarray(predicted, dtype=float)
    gold = np.asarray(gold, dtype=float)
    edges = np.linspace(0.0, 1.0, bins + 1)
    rows = []
    for i in range(bins):
        lo, hi = edges[i], edges[i + 1]
        m = (gold >= lo) & ((gold < hi) if i < bins - 1 else (gold <= hi))
        r = np.nan
        if m.sum() >= 2 and not np.all(predicted[m] == predicted[m][0]):
            with np.errstate(invalid="ignore", divide="ignore"):
                r = float(np.corrcoef(predicted[m], gold[m])[0, 1])
        rows.append((
            float(lo),
            float(hi),
            int(m.sum()),
            float(np.mean(predicted[m])) if m.any() else np.nan,
            float(np.mean(gold[m])) if m.any() else np.nan,
            r,
        ))
    return rows
