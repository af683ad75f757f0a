"""Order-embedding cones and their box realizations.

A cone is the set of points dominating its apex coordinate-wise inside the
nonnegative orthant; its probability under the standard exponential product
measure is exp(-||apex||_1).  Mapping each coordinate through the measure's
CDF turns a cone into a box pinned to the upper corner of the unit cube,
which is how cones embed into the box lattice.  Cone pairs can only be
nonnegatively correlated; boxes have no such restriction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxes import Box, LatticeElement, meet, volume
from .errors import DimensionMismatch
from .measures import ProductMeasure, cone_to_box


@dataclass(frozen=True)
class Cone:
    """Upward-closed orthant cone {x : x >= apex >= 0 coordinate-wise}.

    Apex coordinates may be +inf: the cone degenerates to the empty limit
    with probability 0.
    """

    apex: np.ndarray

    def __post_init__(self):
        apex = np.array(self.apex, dtype=float, copy=True).reshape(-1)
        if apex.size == 0:
            raise ValueError("cone needs at least one dimension")
        if np.any(np.isnan(apex)):
            raise ValueError("cone apex must not contain NaN")
        if np.any(apex < 0):
            raise ValueError("cone apex must lie in the nonnegative orthant")
        apex.setflags(write=False)
        object.__setattr__(self, "apex", apex)

    @property
    def dim(self) -> int:
        return self.apex.shape[0]


def poe_prob(c: Cone) -> float:
    """p(cone) = exp(-||apex||_1) under the exponential product measure."""
    return float(np.exp(-np.sum(c.apex)))


def cone_meet(a: Cone, b: Cone) -> Cone:
    """Intersection of cones: the coordinate-wise max of apexes."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"cones of dimension {a.dim} and {b.dim}")
    return Cone(np.maximum(a.apex, b.apex))


def poe_joint(a: Cone, b: Cone) -> float:
    """p(a, b) = exp(-||max(apex_a, apex_b)||_1); cones always intersect."""
    return poe_prob(cone_meet(a, b))


def poe_covariance(a: Cone, b: Cone) -> float:
    """cov(a, b) = p(a, b) - p(a) p(b); never negative for cones.

    Joint containment max(apex_a, apex_b) can only shrink the L1 norm
    relative to the sum, so exp(-||max||_1) >= exp(-||a||_1 - ||b||_1).
    """
    return poe_joint(a, b) - poe_prob(a) * poe_prob(b)


def realize(cone: Cone, measure: ProductMeasure) -> Box:
    """Box with the same event probability structure as the cone.

    Each cone coordinate maps through the measure's CDF, giving the box
    [F(apex), 1] per dimension; its uniform volume equals the cone's mass
    under ``measure``.
    """
    return cone_to_box(cone.apex, measure)


def box_covariance(a: LatticeElement, b: LatticeElement, measure: ProductMeasure) -> float:
    """cov(a, b) = vol(meet) - vol(a) vol(b); sign-unrestricted for boxes."""
    return volume(meet(a, b), measure) - volume(a, measure) * volume(b, measure)
