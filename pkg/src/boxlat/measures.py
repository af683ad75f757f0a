"""Product probability measures over the embedding space.

A product measure factorizes over coordinates, so the mass of a box is the
product of per-dimension CDF differences.  Two named kinds are provided:
``uniform`` on [0,1]^n and ``exponential`` on the nonnegative orthant with
per-dimension density exp(-t).  Arbitrary monotone per-dimension CDFs can be
supplied for experimentation; only the named kinds support training
gradients and model serialization.
"""

from __future__ import annotations

import numpy as np

from .errors import SupportViolation

UNIFORM = "uniform"
EXPONENTIAL = "exponential"
CUSTOM = "custom"

# Coordinates under the exponential measure are capped here: the mass of
# [clip, inf) is exp(-50) < 2e-22 per dimension, below float64 resolution
# against 1.0, so the cap end of a box behaves like +inf.
DEFAULT_EXPONENTIAL_CLIP = 50.0


class ProductMeasure:
    """Coordinate-wise probability measure used to assign box volumes.

    Attributes:
        kind: one of ``uniform``, ``exponential``, ``custom``.
        dim: number of coordinates.
        support: (lo, hi) bounds every box coordinate must respect.
    """

    def __init__(self, kind, dim, support, cdfs=None):
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.kind = kind
        self.dim = int(dim)
        self.support = (float(support[0]), float(support[1]))
        self._cdfs = cdfs
        if kind == CUSTOM and (cdfs is None or len(cdfs) != dim):
            raise ValueError("custom measure needs one CDF per dimension")

    @classmethod
    def uniform(cls, dim):
        return cls(UNIFORM, dim, (0.0, 1.0))

    @classmethod
    def exponential(cls, dim, clip=DEFAULT_EXPONENTIAL_CLIP):
        return cls(EXPONENTIAL, dim, (0.0, float(clip)))

    @classmethod
    def from_cdfs(cls, cdfs, support):
        """Build a measure from per-dimension monotone CDF callables.

        Each callable must map the support onto (0,1) increasingly; this is
        not validated beyond spot support checks.
        """
        return cls(CUSTOM, len(cdfs), support, cdfs=list(cdfs))

    def __repr__(self):
        return f"ProductMeasure({self.kind}, dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, ProductMeasure):
            return NotImplemented
        if self.kind == CUSTOM or other.kind == CUSTOM:
            return self is other
        return (self.kind, self.dim, self.support) == (
            other.kind,
            other.dim,
            other.support,
        )

    def check_support(self, t):
        lo, hi = self.support
        t = np.asarray(t, dtype=float)
        if np.any(t < lo) or np.any(t > hi):
            raise SupportViolation(
                f"coordinate outside {self.kind} support [{lo}, {hi}]"
            )

    def cdf(self, t, dim=None):
        """Per-dimension CDF F_i(t).

        With ``dim`` given, ``t`` is a scalar for that dimension; without,
        ``t`` is a length-``dim`` vector and the result is elementwise.
        """
        self.check_support(t)
        t = np.asarray(t, dtype=float)
        if self.kind == UNIFORM:
            return t if t.shape else float(t)
        if self.kind == EXPONENTIAL:
            out = -np.expm1(-t)
            return out if out.shape else float(out)
        if dim is not None:
            return float(self._cdfs[dim](float(t)))
        return np.array([self._cdfs[i](float(t[i])) for i in range(self.dim)])

    def log_mass(self, lo, hi):
        """Per-dimension log mass of the intervals [lo_i, hi_i].

        ``lo`` and ``hi`` are arrays with matching trailing dimension; a
        zero-width interval yields -inf.  No support check is done here;
        callers validate boxes on construction paths.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == UNIFORM:
                return np.log(hi - lo)
            if self.kind == EXPONENTIAL:
                # log(exp(-lo) - exp(-hi)) without cancellation
                return -lo + np.log1p(-np.exp(-(hi - lo)))
            flo = np.array([self._cdfs[i](v) for i, v in enumerate(lo)])
            fhi = np.array([self._cdfs[i](v) for i, v in enumerate(hi)])
            return np.log(fhi - flo)

    def dlog_mass(self, lo, hi):
        """Gradients (d/d lo, d/d hi) of the per-dimension log mass.

        Only the named kinds are differentiable through this API.
        """
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if self.kind == UNIFORM:
            inv = 1.0 / (hi - lo)
            return -inv, inv
        if self.kind == EXPONENTIAL:
            width = hi - lo
            return 1.0 / np.expm1(-width), 1.0 / np.expm1(width)
        raise NotImplementedError("gradients require a uniform or exponential measure")


def cone_to_box(apex, measure):
    """Map the upward-closed cone {z : z >= apex} to a unit-cube box.

    The image is the box prod_i [F_i(apex_i), 1], whose volume under the
    uniform measure equals the cone's mass under ``measure``.  The upper
    face is pinned to 1 in every dimension.
    """
    from .boxes import Box

    u = np.asarray(measure.cdf(np.asarray(apex, dtype=float)), dtype=float)
    return Box(u, 1.0 - u)


def full_box(measure):
    """The top lattice element: the box covering the whole support."""
    from .boxes import Box

    lo, hi = measure.support
    n = measure.dim
    return Box(np.full(n, lo), np.full(n, hi - lo))
