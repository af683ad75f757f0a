"""Probabilistic inference over a trained model.

Joints are meets, conditionals are volume ratios, and negated variables
reduce to unions of boxes handled exactly by inclusion-exclusion:

    P(T, not N_1, ..., not N_k) = P(T or N_1 or ... or N_k) - P(N_1 or ... or N_k)

where T is the meet of the positive variables.  Union volumes enumerate
subsets depth-first, pruning any prefix whose running meet is already
empty, and accumulate the alternating sum with compensated summation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boxes import BOTTOM, Box, LatticeElement, meet, volume
from .errors import NullEvidence, UnionCapExceeded
from .measures import full_box
from .model import Model

UNION_CAP = 20


@dataclass(frozen=True)
class Query:
    """Conjunction of positive and negated concepts, optional target.

    Overlapping positive and negative sets are permitted; such queries are
    contradictions and evaluate to probability zero.
    """

    positives: frozenset = field(default_factory=frozenset)
    negatives: frozenset = field(default_factory=frozenset)
    target: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "positives", frozenset(self.positives))
        object.__setattr__(self, "negatives", frozenset(self.negatives))


def joint(model: Model, concepts) -> float:
    """P(all concepts): volume of the meet of their boxes."""
    names = sorted(set(concepts))
    if not names:
        raise ValueError("joint needs at least one concept")
    acc: LatticeElement = model.box(names[0])
    for name in names[1:]:
        acc = meet(acc, model.box(name))
        if acc is BOTTOM:
            return 0.0
    return volume(acc, model.measure)


def conditional(model: Model, target: str, evidence) -> float:
    """P(target | evidence) = P(target, evidence) / P(evidence)."""
    evidence = sorted(set(evidence))
    if not evidence:
        return joint(model, [target])
    denom = joint(model, evidence)
    if denom <= 0.0:
        raise NullEvidence(f"conditioning on null event {evidence}")
    return joint(model, [target, *evidence]) / denom


def union_volume(boxes, measure, cap=UNION_CAP) -> float:
    """P(union of boxes) by inclusion-exclusion over subset meets.

    Subsets are enumerated depth-first carrying the running meet; a prefix
    that already meets to empty contributes nothing and none of its
    extensions are visited.  The alternating sum runs in linear space with
    Kahan compensation and is clamped to [0, 1] at the end.
    """
    boxes = [b for b in boxes if b is not BOTTOM]
    if len(boxes) > cap:
        raise UnionCapExceeded(
            f"{len(boxes)} boxes exceeds the inclusion-exclusion cap of {cap}; "
            "decompose the union into smaller groups"
        )
    if not boxes:
        return 0.0

    total = 0.0
    comp = 0.0

    def accumulate(term):
        nonlocal total, comp
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t

    def descend(start, current, size):
        for i in range(start, len(boxes)):
            m = boxes[i] if current is None else meet(current, boxes[i])
            if m is BOTTOM:
                continue
            sign = 1.0 if (size + 1) % 2 else -1.0
            accumulate(sign * volume(m, measure))
            descend(i + 1, m, size + 1)

    descend(0, None, 0)
    return min(max(total, 0.0), 1.0)


def query_prob(model: Model, q: Query) -> float:
    """P(positives hold and no negative holds), exactly.

    With T the meet of the positives, the answer is
    union({T} + negatives) - union(negatives), clamped to [0, vol(T)].
    An empty positive set conditions on the whole space.
    """
    if q.positives:
        T: LatticeElement = full_box(model.measure)
        for name in sorted(q.positives):
            T = meet(T, model.box(name))
    else:
        T = full_box(model.measure)
    neg_boxes = [model.box(name) for name in sorted(q.negatives)]
    if len(neg_boxes) > UNION_CAP - 1:
        raise UnionCapExceeded(
            f"{len(neg_boxes)} negated variables exceeds the cap of {UNION_CAP - 1}; "
            "decompose the query"
        )
    if T is BOTTOM:
        return 0.0
    vol_T = volume(T, model.measure)
    if not neg_boxes:
        return vol_T
    v1 = union_volume([T, *neg_boxes], model.measure)
    v2 = union_volume(neg_boxes, model.measure)
    return min(max(v1 - v2, 0.0), vol_T)


def conditional_query(model: Model, target: str, positives, negatives) -> float:
    """P(target | positives, not negatives) via two exact negation queries."""
    positives = frozenset(positives)
    negatives = frozenset(negatives)
    denom = query_prob(model, Query(positives, negatives))
    if denom <= 0.0:
        raise NullEvidence(
            f"conditioning on null event {sorted(positives)} minus {sorted(negatives)}"
        )
    num = query_prob(model, Query(positives | {target}, negatives))
    return num / denom
