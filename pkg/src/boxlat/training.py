"""Maximum-likelihood training of box models from probability targets.

The loss is a weighted binary cross-entropy against unary marginal targets
p(a) and pairwise conditional targets P(a|b), where probabilities come from
box volumes.  Disjoint pairs with a positive target have no joint volume to
differentiate, so the lower bound

    p(a ^ b) >= p(a) + p(b) - p(a v b)

stands in: the loss term becomes log(p(join) - p(a) - p(b) + eps), whose
minimization pulls the boxes until they overlap and the exact branch takes
over.  Gradients are analytic throughout; meet/join bounds route their
gradient to whichever box attains the coordinate extremum (first argument
on exact ties).  Optimization is Adam with a Euclidean projection onto the
feasible set after every step.  With poe_mode set, box maxima are pinned to
the support's upper boundary and gradients chain through the pin.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .boxes import BOTTOM, Box, join, log_volume, meet, volume
from .errors import TrainingDiverged
from .measures import ProductMeasure
from .model import Model

log = logging.getLogger(__name__)

# Below this probability, conditioning targets are meaningless; such pair
# terms are skipped with a warning rather than divided by ~0.
NULL_CONDITION_FLOOR = 1e-12

_TINY = 1e-300

# Per-coordinate gradient clip applied before the Adam update.  The exact
# pair term's q/(1-q) ratio is unbounded as the meet fills the conditioning
# box, and squaring such values overflows Adam's second moment.
GRAD_CLIP = 1e6


@dataclass(frozen=True)
class TrainExample:
    """One target: unary p(a) (b is None) or pairwise P(a|b).

    is_negative marks corruption-sampled pairs; their delta gradients are
    suppressed so negatives reposition boxes without shrinking them.
    """

    a: str
    b: str | None
    target: float
    weight: float = 1.0
    is_negative: bool = False

    def __post_init__(self):
        if not 0.0 <= self.target <= 1.0:
            raise ValueError(f"target must be in [0,1], got {self.target}")
        if self.weight < 0.0:
            raise ValueError(f"weight must be nonnegative, got {self.weight}")

    @classmethod
    def unary(cls, concept, target, weight=1.0):
        return cls(concept, None, float(target), float(weight))

    @classmethod
    def pair(cls, a, b, target, weight=1.0, is_negative=False):
        return cls(a, b, float(target), float(weight), is_negative)

    @property
    def is_unary(self):
        return self.b is None


@dataclass
class TrainConfig:
    """Hyperparameters; defaults follow the hierarchy-scale recipe."""

    dim: int = 50
    learning_rate: float = 0.001
    batch_size: int = 800
    unary_weight: float = 9.0
    edge_weight: float = 1.0
    eps_min: float = 1e-6
    eps_surrogate: float = 1e-8
    reg_weight: float = 0.005
    epochs: int = 50
    seed: int = 0
    poe_mode: bool = False
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        for name in ("unary_weight", "edge_weight", "reg_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass
class InitSpec:
    """Random initialization ranges, relative to the support's lower bound.

    Minima are drawn near the lower corner and sides moderately wide so
    that most box pairs overlap at step zero and exact joint gradients
    exist immediately.
    """

    min_range: tuple = (0.0, 0.1)
    side_range: tuple = (0.2, 0.9)


def surrogate_gap(a: Box, b: Box, measure: ProductMeasure) -> float:
    """Lower bound p(a) + p(b) - p(a v b) on the joint probability.

    Tight when one box contains the other; nonpositive when they are
    disjoint.
    """
    return (
        volume(a, measure)
        + volume(b, measure)
        - volume(join(a, b), measure)
    )


def pair_log_prob(a: Box, b: Box, measure: ProductMeasure, eps_surrogate=1e-8):
    """Log joint estimate and whether the disjoint surrogate was used.

    Overlapping boxes give the exact log meet volume.  Disjoint boxes give
    log(p(join) - p(a) - p(b) + eps); the loss negates that quantity, so
    minimizing it drives the gap between the boxes to zero.
    """
    m = meet(a, b)
    if m is not BOTTOM:
        return log_volume(m, measure), False
    gap = surrogate_gap(a, b, measure)
    return float(np.log(max(-gap, 0.0) + eps_surrogate)), True


class _ParamState:
    """Dense (vocab, dim) parameter arrays plus the name index."""

    def __init__(self, names, MIN, DELTA, measure):
        self.names = list(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.MIN = MIN
        self.DELTA = DELTA
        self.measure = measure

    @classmethod
    def from_model(cls, model: Model):
        names = model.names()
        MIN = np.stack([model.boxes[n].min for n in names])
        DELTA = np.stack([model.boxes[n].delta for n in names])
        return cls(names, MIN, DELTA, model.measure)

    def to_model(self, poe=False) -> Model:
        model = Model(measure=self.measure, poe=poe)
        for i, name in enumerate(self.names):
            model.boxes[name] = Box(self.MIN[i], self.DELTA[i])
        return model


class _Batch:
    """Index-array view of a list of examples against a fixed vocabulary."""

    def __init__(self, examples, index):
        ui, ut, uw = [], [], []
        pa, pb, pt, pw, pn = [], [], [], [], []
        for ex in examples:
            if ex.is_unary:
                ui.append(index[ex.a])
                ut.append(ex.target)
                uw.append(ex.weight)
            else:
                pa.append(index[ex.a])
                pb.append(index[ex.b])
                pt.append(ex.target)
                pw.append(ex.weight)
                pn.append(ex.is_negative)
        self.ui = np.asarray(ui, dtype=np.intp)
        self.ut = np.asarray(ut, dtype=float)
        self.uw = np.asarray(uw, dtype=float)
        self.pa = np.asarray(pa, dtype=np.intp)
        self.pb = np.asarray(pb, dtype=np.intp)
        self.pt = np.asarray(pt, dtype=float)
        self.pw = np.asarray(pw, dtype=float)
        self.pn = np.asarray(pn, dtype=bool)
        self.size = len(examples)

    def take(self, rows_u, rows_p):
        out = object.__new__(_Batch)
        out.ui = self.ui[rows_u]
        out.ut = self.ut[rows_u]
        out.uw = self.uw[rows_u]
        out.pa = self.pa[rows_p]
        out.pb = self.pb[rows_p]
        out.pt = self.pt[rows_p]
        out.pw = self.pw[rows_p]
        out.pn = self.pn[rows_p]
        out.size = len(rows_u) + len(rows_p)
        return out

    def support(self):
        return np.unique(np.concatenate([self.ui, self.pa, self.pb]))


def _loss_grad(MIN, DELTA, measure, cfg, batch, want_grad=True):
    """Mean weighted cross-entropy over the batch plus the max regularizer.

    Returns (loss, GMIN, GDELTA, skipped) with dense gradient arrays (or
    None without want_grad); skipped counts pair terms dropped because the
    conditioning box had near-zero probability.
    """
    V, D = MIN.shape
    MAX = MIN + DELTA
    GMIN = np.zeros_like(MIN) if want_grad else None
    GDELTA = np.zeros_like(DELTA) if want_grad else None
    total = 0.0
    skipped = 0

    # Unary marginal terms.
    if batch.ui.size:
        lo = MIN[batch.ui]
        hi = MAX[batch.ui]
        lm = measure.log_mass(lo, hi)
        La = lm.sum(axis=1)
        p = np.exp(La)
        one_minus = np.maximum(-np.expm1(La), _TINY)
        t = batch.ut
        w = cfg.unary_weight * batch.uw
        total += float(np.sum(-w * (t * La + (1.0 - t) * np.log(one_minus))))
        if want_grad:
            dLa = -w * (t - (1.0 - t) * p / one_minus)
            dlo, dhi = measure.dlog_mass(lo, hi)
            np.add.at(GMIN, batch.ui, dLa[:, None] * (dlo + dhi))
            np.add.at(GDELTA, batch.ui, dLa[:, None] * dhi)

    # Pairwise conditional terms.
    if batch.pa.size:
        amin = MIN[batch.pa]
        adel = DELTA[batch.pa]
        amax = MAX[batch.pa]
        bmin = MIN[batch.pb]
        bmax = MAX[batch.pb]
        lmb = measure.log_mass(bmin, bmax)
        Lb = lmb.sum(axis=1)
        cond_ok = Lb >= np.log(NULL_CONDITION_FLOOR)
        skipped += int(np.sum(~cond_ok))

        mlo = np.maximum(amin, bmin)
        mhi = np.minimum(amax, bmax)
        alive = np.all(mhi > mlo, axis=1)
        t = batch.pt
        w = cfg.edge_weight * batch.pw
        dlo_b, dhi_b = measure.dlog_mass(bmin, bmax) if want_grad else (None, None)

        def scatter_pair(rows, ga_min, ga_del, gb_min, gb_del):
            keep = ~batch.pn[rows]
            np.add.at(GMIN, batch.pa[rows], ga_min)
            np.add.at(GMIN, batch.pb[rows], gb_min)
            np.add.at(GDELTA, batch.pa[rows], ga_del * keep[:, None])
            np.add.at(GDELTA, batch.pb[rows], gb_del * keep[:, None])

        ex = np.flatnonzero(alive & cond_ok)
        if ex.size:
            lo = mlo[ex]
            hi = mhi[ex]
            Lmeet = measure.log_mass(lo, hi).sum(axis=1)
            u = Lmeet - Lb[ex]
            q = np.exp(u)
            one_minus = np.maximum(-np.expm1(u), _TINY)
            te, we = t[ex], w[ex]
            total += float(np.sum(-we * (te * u + (1.0 - te) * np.log(one_minus))))
            if want_grad:
                du = (-we * (te - (1.0 - te) * q / one_minus))[:, None]
                dlo_m, dhi_m = measure.dlog_mass(lo, hi)
                a_lo = (amin[ex] >= bmin[ex])
                a_hi = (amax[ex] <= bmax[ex])
                ga_min = du * (dlo_m * a_lo + dhi_m * a_hi)
                ga_del = du * (dhi_m * a_hi)
                gb_min = du * (dlo_m * ~a_lo + dhi_m * ~a_hi - dlo_b[ex] - dhi_b[ex])
                gb_del = du * (dhi_m * ~a_hi - dhi_b[ex])
                scatter_pair(ex, ga_min, ga_del, gb_min, gb_del)

        sx = np.flatnonzero(~alive & cond_ok & (t > 0.0))
        if sx.size:
            jlo = np.minimum(amin[sx], bmin[sx])
            jhi = np.maximum(amax[sx], bmax[sx])
            Lj = measure.log_mass(jlo, jhi).sum(axis=1)
            pj = np.exp(Lj)
            lma = measure.log_mass(amin[sx], amax[sx])
            La = lma.sum(axis=1)
            pa = np.exp(La)
            pb = np.exp(Lb[sx])
            gap = np.maximum(pj - pa - pb, 0.0) + cfg.eps_surrogate
            ts, ws = t[sx], w[sx]
            total += float(np.sum(ws * ts * (np.log(gap) + Lb[sx])))
            if want_grad:
                s = (ws * ts / gap)[:, None]
                wt = (ws * ts)[:, None]
                dlo_j, dhi_j = measure.dlog_mass(jlo, jhi)
                dlo_a, dhi_a = measure.dlog_mass(amin[sx], amax[sx])
                a_jlo = (amin[sx] <= bmin[sx])
                a_jhi = (amax[sx] >= bmax[sx])
                pjc = pj[:, None]
                ga_min = s * (
                    pjc * (dlo_j * a_jlo + dhi_j * a_jhi)
                    - pa[:, None] * (dlo_a + dhi_a)
                )
                ga_del = s * (pjc * dhi_j * a_jhi - pa[:, None] * dhi_a)
                gb_min = (
                    s * (
                        pjc * (dlo_j * ~a_jlo + dhi_j * ~a_jhi)
                        - pb[:, None] * (dlo_b[sx] + dhi_b[sx])
                    )
                    + wt * (dlo_b[sx] + dhi_b[sx])
                )
                gb_del = s * (pjc * dhi_j * ~a_jhi - pb[:, None] * dhi_b[sx]) + wt * dhi_b[sx]
                scatter_pair(sx, ga_min, ga_del, gb_min, gb_del)

    # L1 pull of each max toward the support's upper bound, applied to the
    # concepts the batch touches.
    if cfg.reg_weight > 0.0 and batch.size:
        upper = measure.support[1]
        idx = batch.support()
        gap = upper - MAX[idx]
        total += cfg.reg_weight * float(np.sum(np.abs(gap)))
        if want_grad:
            g = -cfg.reg_weight * np.sign(gap)
            GMIN[idx] += g
            GDELTA[idx] += g

    n = max(batch.size, 1)
    if want_grad:
        GMIN /= n
        GDELTA /= n
    return total / n, GMIN, GDELTA, skipped


def loss(model: Model, batch, cfg: TrainConfig):
    """Batch loss and per-concept (min, delta) gradients.

    Returns (value, grads) where grads maps each concept in the batch
    support to a (grad_min, grad_delta) array pair.
    """
    state = _ParamState.from_model(model)
    compiled = _Batch(list(batch), state.index)
    value, GMIN, GDELTA, _ = _loss_grad(
        state.MIN, state.DELTA, state.measure, cfg, compiled
    )
    _check_finite(value, GMIN, GDELTA, state.names, where="loss")
    grads = {}
    for i in compiled.support():
        grads[state.names[i]] = (GMIN[i].copy(), GDELTA[i].copy())
    return value, grads


def _check_finite(value, GMIN, GDELTA, names, where):
    if np.isfinite(value) and (
        GMIN is None or (np.all(np.isfinite(GMIN)) and np.all(np.isfinite(GDELTA)))
    ):
        return
    bad = set()
    if GMIN is not None:
        rows = ~(np.all(np.isfinite(GMIN), axis=1) & np.all(np.isfinite(GDELTA), axis=1))
        bad = {names[i] for i in np.flatnonzero(rows)}
    raise TrainingDiverged(f"non-finite {where}; concepts: {sorted(bad) or 'n/a'}")


def project(model: Model, cfg: TrainConfig) -> Model:
    """Clamp a model's boxes onto the feasible set (new Model returned)."""
    state = _ParamState.from_model(model)
    _project(state.MIN, state.DELTA, state.measure, cfg)
    return state.to_model(poe=cfg.poe_mode or model.poe)


def _project(MIN, DELTA, measure, cfg):
    lo, hi = measure.support
    if cfg.poe_mode:
        # min is the only free parameter once max is pinned to the support
        # top; clamping against the stale delta would forbid shrinking.
        np.clip(MIN, lo, hi - cfg.eps_min, out=MIN)
        DELTA[:] = hi - MIN
        return
    np.clip(DELTA, cfg.eps_min, hi - lo, out=DELTA)
    np.clip(MIN, lo, hi - DELTA, out=MIN)


def init_params(vocab, cfg: TrainConfig, measure, rng, init: InitSpec | None = None):
    """Draw initial (min, delta) arrays and project them feasible."""
    init = init or InitSpec()
    lo, _ = measure.support
    V = len(vocab)
    MIN = lo + rng.uniform(*init.min_range, size=(V, cfg.dim))
    DELTA = rng.uniform(*init.side_range, size=(V, cfg.dim))
    _project(MIN, DELTA, measure, cfg)
    return MIN, DELTA


def fit(
    data,
    cfg: TrainConfig,
    *,
    measure: ProductMeasure | None = None,
    vocab=None,
    init: InitSpec | None = None,
    dev=None,
    log_fn=None,
):
    """Train a model with shuffled mini-batches, Adam, and projection.

    data/dev are iterables of TrainExample.  The vocabulary defaults to the
    sorted set of concepts in data.  Returns (model, history) where history
    has one record per epoch: epoch index, mean train loss, dev loss (None
    without a dev set).  Fully deterministic for a given config seed.
    """
    data = list(data)
    if not data:
        raise ValueError("fit needs at least one example")
    if measure is None:
        measure = ProductMeasure.uniform(cfg.dim)
    if measure.dim != cfg.dim:
        raise ValueError(f"measure dimension {measure.dim} != config dimension {cfg.dim}")
    if vocab is None:
        seen = set()
        for ex in data:
            seen.add(ex.a)
            if ex.b is not None:
                seen.add(ex.b)
        vocab = sorted(seen)
    rng = np.random.default_rng(cfg.seed)
    MIN, DELTA = init_params(vocab, cfg, measure, rng, init)
    state = _ParamState(vocab, MIN, DELTA, measure)
    compiled = _Batch(data, state.index)
    dev_compiled = _Batch(list(dev), state.index) if dev else None

    kinds = np.array([0 if ex.is_unary else 1 for ex in data])
    # Position of each example inside its kind-group, for slicing _Batch rows.
    within = np.zeros(len(data), dtype=np.intp)
    within[kinds == 0] = np.arange(int(np.sum(kinds == 0)))
    within[kinds == 1] = np.arange(int(np.sum(kinds == 1)))

    m_min = np.zeros_like(MIN)
    v_min = np.zeros_like(MIN)
    m_del = np.zeros_like(DELTA)
    v_del = np.zeros_like(DELTA)
    step = 0
    history = []
    skipped_total = 0

    for epoch in range(cfg.epochs):
        order = rng.permutation(len(data))
        epoch_loss = 0.0
        for bi, start in enumerate(range(0, len(data), cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            rows_u = within[idx[kinds[idx] == 0]]
            rows_p = within[idx[kinds[idx] == 1]]
            sub = compiled.take(rows_u, rows_p)
            value, GMIN, GDELTA, skipped = _loss_grad(MIN, DELTA, measure, cfg, sub)
            skipped_total += skipped
            try:
                _check_finite(value, GMIN, GDELTA, state.names, where="gradient")
            except TrainingDiverged as exc:
                raise TrainingDiverged(f"epoch {epoch} batch {bi}: {exc}") from None
            if cfg.poe_mode:
                GMIN = GMIN - GDELTA
                GDELTA = np.zeros_like(GDELTA)
            np.clip(GMIN, -GRAD_CLIP, GRAD_CLIP, out=GMIN)
            np.clip(GDELTA, -GRAD_CLIP, GRAD_CLIP, out=GDELTA)
            step += 1
            c1 = 1.0 - cfg.beta1**step
            c2 = 1.0 - cfg.beta2**step
            for par, g, mm, vv in (
                (MIN, GMIN, m_min, v_min),
                (DELTA, GDELTA, m_del, v_del),
            ):
                mm *= cfg.beta1
                mm += (1.0 - cfg.beta1) * g
                vv *= cfg.beta2
                vv += (1.0 - cfg.beta2) * g * g
                par -= cfg.learning_rate * (mm / c1) / (np.sqrt(vv / c2) + cfg.adam_eps)
            _project(MIN, DELTA, measure, cfg)
            epoch_loss += value * sub.size
        mean_loss = epoch_loss / len(data)
        dev_loss = None
        if dev_compiled is not None:
            dev_loss, _, _, _ = _loss_grad(
                MIN, DELTA, measure, cfg, dev_compiled, want_grad=False
            )
        history.append({"epoch": epoch, "loss": mean_loss, "dev": dev_loss})
        if log_fn is not None:
            dev_txt = "" if dev_loss is None else f"{dev_loss:.6g}"
            log_fn(f"{epoch}\t{mean_loss:.6g}\t{dev_txt}")

    if skipped_total:
        log.warning(
            "skipped %d pair terms conditioned on near-zero-probability boxes",
            skipped_total,
        )
    return state.to_model(poe=cfg.poe_mode), history
