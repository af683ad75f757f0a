"""Joint, conditional, and negation queries via inclusion-exclusion."""

import numpy as np
import pytest

from boxlat import (
    BOTTOM,
    Box,
    Model,
    NullEvidence,
    ProductMeasure,
    Query,
    UNION_CAP,
    UnionCapExceeded,
    UnknownConcept,
    conditional,
    conditional_query,
    joint,
    query_prob,
    union_volume,
    volume,
)

U2 = ProductMeasure.uniform(2)


def make_model(boxes, dim=2):
    m = Model(ProductMeasure.uniform(dim))
    for name, (lo, hi) in boxes.items():
        m.add(name, Box.from_bounds(lo, hi))
    return m


@pytest.fixture
def model():
    return make_model({
        "a": ([0.0, 0.0], [0.5, 0.5]),
        "b": ([0.25, 0.25], [0.75, 0.75]),
        "c": ([0.6, 0.6], [1.0, 1.0]),
        "d": ([0.1, 0.1], [0.2, 0.2]),
    })


def random_model(seed, n=6, dim=2):
    rng = np.random.default_rng(seed)
    m = Model(ProductMeasure.uniform(dim))
    for i in range(n):
        lo = rng.random(dim) * 0.7
        m.add(f"v{i}", Box.from_bounds(lo, lo + rng.random(dim) * 0.29 + 0.01))
    return m


class TestJoint:
    def test_unary_marginal(self, model):
        assert joint(model, ["a"]) == pytest.approx(0.25)

    def test_idempotent(self, model):
        assert joint(model, ["a", "a"]) == pytest.approx(joint(model, ["a"]))

    def test_disjoint_pair(self, model):
        assert joint(model, ["a", "c"]) == 0.0

    def test_overlap(self, model):
        assert joint(model, ["a", "b"]) == pytest.approx(0.0625)

    def test_unknown_concept(self, model):
        with pytest.raises(UnknownConcept, match="zzz"):
            joint(model, ["a", "zzz"])

    def test_empty_errors(self, model):
        with pytest.raises(ValueError):
            joint(model, [])


class TestConditional:
    def test_empty_evidence_is_marginal(self, model):
        assert conditional(model, "a", []) == pytest.approx(0.25)

    def test_containment_entails(self, model):
        assert conditional(model, "a", ["d"]) == pytest.approx(1.0)

    def test_null_evidence(self, model):
        with pytest.raises(NullEvidence):
            conditional(model, "b", ["a", "c"])

    def test_bayes_consistency(self, model):
        pab = joint(model, ["a", "b"])
        assert conditional(model, "a", ["b"]) * joint(model, ["b"]) == pytest.approx(pab)


class TestUnionVolume:
    def test_single_box(self, model):
        assert union_volume([model.box("a")], U2) == pytest.approx(0.25)

    def test_disjoint_additive(self):
        a = Box.from_bounds([0.0, 0.0], [1.0, 0.5])
        b = Box.from_bounds([0.0, 0.5], [1.0, 1.0])
        assert union_volume([a, b], U2) == pytest.approx(1.0)

    def test_bottom_filtered(self, model):
        assert union_volume([model.box("a"), BOTTOM], U2) == pytest.approx(0.25)

    def test_cap(self, model):
        boxes = [model.box("a")] * (UNION_CAP + 1)
        with pytest.raises(UnionCapExceeded):
            union_volume(boxes, U2)

    def test_grid_oracle_three_boxes(self):
        rng = np.random.default_rng(5)
        n_grid = 500
        xc = (np.arange(n_grid) + 0.5) / n_grid
        X, Y = np.meshgrid(xc, xc, indexing="ij")
        for _ in range(20):
            boxes = []
            occupied = np.zeros_like(X, dtype=bool)
            for _ in range(3):
                lo = rng.random(2) * 0.6
                hi = lo + rng.random(2) * 0.39 + 0.01
                boxes.append(Box.from_bounds(lo, hi))
                occupied |= (
                    (X >= lo[0]) & (X <= hi[0]) & (Y >= lo[1]) & (Y <= hi[1])
                )
            grid = occupied.mean()
            # Rasterization error is bounded by total boundary length / grid.
            assert union_volume(boxes, U2) == pytest.approx(
                grid, abs=3 * 4 / n_grid
            )

    def test_permutation_invariant(self):
        rng = np.random.default_rng(6)
        boxes = []
        for _ in range(5):
            lo = rng.random(2) * 0.5
            boxes.append(Box.from_bounds(lo, lo + rng.random(2) * 0.4 + 0.05))
        v = union_volume(boxes, U2)
        assert union_volume(boxes[::-1], U2) == pytest.approx(v, abs=1e-14)

    def test_clamped_to_unit(self):
        boxes = [Box.from_bounds([0, 0], [1, 1])] * 3
        assert union_volume(boxes, U2) == pytest.approx(1.0)


class TestQueryProb:
    def test_no_negatives_is_joint(self, model):
        q = Query(positives={"a", "b"}, negatives=set())
        assert query_prob(model, q) == pytest.approx(joint(model, ["a", "b"]))

    def test_contradiction_is_zero(self, model):
        q = Query(positives={"a"}, negatives={"a"})
        assert query_prob(model, q) == 0.0

    def test_pure_negation(self, model):
        q = Query(positives=set(), negatives={"a"})
        assert query_prob(model, q) == pytest.approx(0.75)

    def test_complement_additivity(self):
        # P(a) = P(a, b) + P(a, not b) for random pairs.
        for seed in range(30):
            m = random_model(seed)
            names = m.names()
            a, b = names[0], names[1]
            pa = query_prob(m, Query(positives={a}, negatives=set()))
            pab = query_prob(m, Query(positives={a, b}, negatives=set()))
            panb = query_prob(m, Query(positives={a}, negatives={b}))
            assert pab + panb == pytest.approx(pa, abs=1e-10)

    def test_permutation_invariance_of_sets(self, model):
        q1 = Query(positives={"a", "b"}, negatives={"c", "d"})
        q2 = Query(positives={"b", "a"}, negatives={"d", "c"})
        assert query_prob(model, q1) == query_prob(model, q2)

    def test_monte_carlo_agreement(self):
        rng = np.random.default_rng(7)
        n = 200_000
        pts = rng.random((n, 2))
        for seed in range(10):
            m = random_model(seed)
            names = m.names()
            pos, neg = set(names[:2]), set(names[2:5])
            p = query_prob(m, Query(positives=pos, negatives=neg))
            inside = np.ones(n, dtype=bool)
            for nm in pos:
                b = m.box(nm)
                inside &= np.all((pts >= b.min) & (pts <= b.max), axis=1)
            for nm in neg:
                b = m.box(nm)
                inside &= ~np.all((pts >= b.min) & (pts <= b.max), axis=1)
            est = inside.mean()
            se = np.sqrt(max(p * (1 - p), 1e-12) / n)
            assert abs(est - p) <= 4 * se + 1.0 / n

    def test_cap_on_negations(self, model):
        q = Query(positives=set(), negatives={f"x{i}" for i in range(UNION_CAP)})
        with pytest.raises((UnionCapExceeded, UnknownConcept)):
            query_prob(model, q)


class TestConditionalQuery:
    def test_reduces_to_conditional(self, model):
        assert conditional_query(model, "a", ["b"], []) == pytest.approx(
            conditional(model, "a", ["b"])
        )

    def test_negative_evidence(self, model):
        # P(a | not c): a and c are disjoint, so conditioning on the
        # complement of c renormalizes by 1 - P(c).
        expected = 0.25 / (1.0 - volume(model.box("c"), U2))
        assert conditional_query(model, "a", [], ["c"]) == pytest.approx(expected)

    def test_null_evidence_raises(self, model):
        with pytest.raises(NullEvidence):
            conditional_query(model, "b", ["a", "c"], [])

    def test_result_in_unit_interval(self):
        for seed in range(20):
            m = random_model(seed)
            names = m.names()
            try:
                p = conditional_query(m, names[0], names[1:3], names[3:5])
            except NullEvidence:
                continue
            assert 0.0 <= p <= 1.0


class TestQueryType:
    def test_sets_coerced(self):
        q = Query(positives=["a", "a", "b"], negatives=["c"])
        assert q.positives == frozenset({"a", "b"})
        assert q.negatives == frozenset({"c"})

    def test_hashable(self):
        assert hash(Query(positives={"a"}, negatives=frozenset()))
