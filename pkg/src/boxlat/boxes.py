"""Axis-aligned boxes and their bounded-lattice operations.

A box is stored as a minimum corner plus a nonnegative offset per dimension.
The lattice has an explicit bottom element (the empty set) rather than a
degenerate box, so intersection emptiness never produces negative side
lengths downstream.  Volumes are accumulated in log space and exponentiated
at the API boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginal, DimensionMismatch
from .measures import ProductMeasure


class _Bottom:
    """The empty set; identity for join, absorbing for meet."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Bottom"


BOTTOM = _Bottom()


@dataclass(frozen=True)
class Box:
    """Product of per-dimension intervals [min_i, min_i + delta_i].

    Immutable; the backing arrays are copied and marked read-only.  A box
    must have strictly positive width in every dimension -- zero-measure
    sets are represented by BOTTOM, never by a degenerate box.
    """

    min: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        mn = np.array(self.min, dtype=float, copy=True).reshape(-1)
        dl = np.array(self.delta, dtype=float, copy=True).reshape(-1)
        if mn.shape != dl.shape:
            raise DimensionMismatch(
                f"min has dimension {mn.shape[0]}, delta {dl.shape[0]}"
            )
        if mn.size == 0:
            raise ValueError("box needs at least one dimension")
        if not (np.all(np.isfinite(mn)) and np.all(np.isfinite(dl))):
            raise ValueError("box coordinates must be finite")
        if np.any(dl <= 0):
            raise ValueError("box widths must be strictly positive; use BOTTOM for empty sets")
        mn.setflags(write=False)
        dl.setflags(write=False)
        object.__setattr__(self, "min", mn)
        object.__setattr__(self, "delta", dl)

    @classmethod
    def from_bounds(cls, lo, hi):
        lo = np.asarray(lo, dtype=float)
        return cls(lo, np.asarray(hi, dtype=float) - lo)

    @property
    def max(self) -> np.ndarray:
        return self.min + self.delta

    @property
    def dim(self) -> int:
        return self.min.shape[0]

    def __repr__(self):
        pairs = ", ".join(
            f"[{lo:g},{hi:g}]" for lo, hi in zip(self.min, self.max)
        )
        return f"Box({pairs})"


LatticeElement = Box | _Bottom


def _check_dims(a: Box, b: Box):
    if a.dim != b.dim:
        raise DimensionMismatch(f"boxes of dimension {a.dim} and {b.dim}")


def meet(a: LatticeElement, b: LatticeElement) -> LatticeElement:
    """Greatest lower bound: the intersection box, or BOTTOM if empty.

    A zero-width touch counts as empty (its measure is zero), so the
    intersection must be strictly wider than a point in every dimension.
    """
    if a is BOTTOM or b is BOTTOM:
        return BOTTOM
    _check_dims(a, b)
    lo = np.maximum(a.min, b.min)
    hi = np.minimum(a.max, b.max)
    if np.any(hi <= lo):
        return BOTTOM
    return Box(lo, hi - lo)


def join(a: LatticeElement, b: LatticeElement) -> LatticeElement:
    """Least upper bound: the smallest box enclosing both arguments."""
    if a is BOTTOM:
        return b
    if b is BOTTOM:
        return a
    _check_dims(a, b)
    lo = np.minimum(a.min, b.min)
    hi = np.maximum(a.max, b.max)
    return Box(lo, hi - lo)


def contains(a: Box, b: Box) -> bool:
    """True iff box ``a`` includes box ``b``."""
    _check_dims(a, b)
    return bool(np.all(a.min <= b.min) and np.all(b.max <= a.max))


def log_volume(x: LatticeElement, measure: ProductMeasure) -> float:
    """Log of the measure-weighted volume; -inf for BOTTOM."""
    if x is BOTTOM:
        return float("-inf")
    if x.dim != measure.dim:
        raise DimensionMismatch(
            f"box of dimension {x.dim} under measure of dimension {measure.dim}"
        )
    measure.check_support(x.min)
    measure.check_support(x.max)
    return float(np.sum(measure.log_mass(x.min, x.max)))


def volume(x: LatticeElement, measure: ProductMeasure) -> float:
    """Measure-weighted volume in [0, 1]; exactly 0 for BOTTOM."""
    if x is BOTTOM:
        return 0.0
    return float(np.exp(log_volume(x, measure)))


def correlation(a: Box, b: Box, measure: ProductMeasure) -> float:
    """Pearson correlation of the Bernoulli events defined by two boxes.

    Undefined (raises) when either marginal is exactly 0 or 1.
    """
    pa = volume(a, measure)
    pb = volume(b, measure)
    if pa <= 0.0 or pa >= 1.0 or pb <= 0.0 or pb >= 1.0:
        raise DegenerateMarginal(
            f"correlation needs marginals strictly inside (0,1); got {pa}, {pb}"
        )
    pab = volume(meet(a, b), measure)
    return (pab - pa * pb) / np.sqrt(pa * (1.0 - pa) * pb * (1.0 - pb))
