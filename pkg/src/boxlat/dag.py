"""Directed graphs extracted from pairwise score tables.

Asymmetrizing a conditional probability table (keep the larger of P(a|b)
and P(b|a) as an edge) always yields a DAG, because the retained edge
points from the lower-marginal variable to the higher-marginal one and
marginals order the vertices.  The same surgery on a KL divergence table
between Gaussian embeddings carries no such guarantee; the five shipped
Gaussians are the counterexample, cycling through vertices 5, 1, 3
(1-based) at threshold 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cpd import CpdTable
from .errors import DataFormatError, DimensionMismatch

_FMT = "%.12g"


@dataclass
class Digraph:
    """Directed graph on vertices 0..n-1 with weighted edges, no loops."""

    n: int
    edges: dict = field(default_factory=dict)
    names: list[str] | None = None

    def __post_init__(self):
        for (u, v) in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside vertex range")
        if self.names is not None and len(self.names) != self.n:
            raise ValueError("need one name per vertex")

    def successors(self):
        out = [[] for _ in range(self.n)]
        for (u, v) in self.edges:
            out[u].append(v)
        for lst in out:
            lst.sort()
        return out

    def label(self, v):
        return self.names[v] if self.names is not None else str(v)

    def save_tsv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for (u, v) in sorted(self.edges):
                w = self.edges[(u, v)]
                fh.write(f"{self.label(u)}\t{self.label(v)}\t{_FMT % w}\n")


def load_edges_tsv(path):
    """Read `src<TAB>dst<TAB>weight` lines; returns (names, Digraph)."""
    names = []
    index = {}
    raw = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) not in (2, 3):
                raise DataFormatError(
                    f"expected 'src<TAB>dst[<TAB>weight]', got {line!r}", path, ln
                )
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError as exc:
                    raise DataFormatError(str(exc), path, ln) from None
            for name in parts[:2]:
                if name not in index:
                    index[name] = len(names)
                    names.append(name)
            raw.append((index[parts[0]], index[parts[1]], w))
    edges = {(u, v): w for u, v, w in raw}
    return Digraph(len(names), edges, names)


def asymmetrize(scores, names=None, min_gap=0.0) -> Digraph:
    """Keep edge j -> i with weight scores[i][j] iff it strictly beats the
    reverse entry; exact ties drop both directions.

    min_gap additionally drops any pair whose |scores[i][j] - scores[j][i]|
    falls below it.  The diagonal is ignored.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
        raise ValueError(f"scores must be square, got shape {scores.shape}")
    n = scores.shape[0]
    edges = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            fwd, rev = scores[i, j], scores[j, i]
            if fwd > rev and abs(fwd - rev) >= min_gap:
                edges[(j, i)] = fwd
    return Digraph(n, edges, list(names) if names is not None else None)


def is_acyclic(g: Digraph):
    """(True, None) when a topological order exists, else (False, cycle).

    The witness cycle is a vertex list [v0, v1, ..., vk] with edges
    v0 -> v1 -> ... -> vk -> v0.  Iterative three-color depth-first
    search: a back edge to an in-progress vertex closes a cycle.
    """
    succ = g.successors()
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * g.n
    path = []
    for root in range(g.n):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = GRAY
        path.append(root)
        while stack:
            node, it = stack[-1]
            advanced = False
            for v in it:
                if color[v] == GRAY:
                    return False, path[path.index(v) :]
                if color[v] == WHITE:
                    color[v] = GRAY
                    path.append(v)
                    stack.append((v, iter(succ[v])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return True, None


def perturb_ties(table: CpdTable, lam: float, seed: int) -> CpdTable:
    """Mix the table with an independent random product distribution.

    The mixture (1 - lam) P + lam Q, with Q a product of Bernoullis whose
    parameters are drawn uniformly, keeps joint consistency exactly while
    breaking marginal ties almost surely.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lam must be in (0, 1), got {lam}")
    rng = np.random.default_rng(seed)
    r = rng.uniform(size=len(table))
    p = (1.0 - lam) * table.marginals + lam * r
    joint = (1.0 - lam) * table.joint() + lam * np.outer(r, r)
    cond = joint / p[None, :]
    np.fill_diagonal(cond, 1.0)
    return CpdTable(table.names, p, cond)


@dataclass(frozen=True)
class DiagGaussian:
    """Multivariate normal with diagonal covariance."""

    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float, copy=True).reshape(-1)
        var = np.array(self.variance, dtype=float, copy=True).reshape(-1)
        if mean.shape != var.shape:
            raise DimensionMismatch(
                f"mean has dimension {mean.shape[0]}, variance {var.shape[0]}"
            )
        if np.any(var <= 0):
            raise ValueError("variances must be positive")
        mean.setflags(write=False)
        var.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", var)

    @property
    def dim(self):
        return self.mean.shape[0]


def gaussian_kl(a: DiagGaussian, b: DiagGaussian) -> float:
    """KL(a || b) in closed form for diagonal Gaussians."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"Gaussians of dimension {a.dim} and {b.dim}")
    ratio = a.variance / b.variance
    quad = (b.mean - a.mean) ** 2 / b.variance
    return 0.5 * float(np.sum(ratio + quad - 1.0 - np.log(ratio)))


def kl_matrix(gaussians, transpose=False) -> np.ndarray:
    """Pairwise divergence matrix A[i][j] = KL(G_i || G_j) (or transposed).

    The direction convention is not canonical; both are available and the
    cycle counterexample is certified under at least one.
    """
    n = len(gaussians)
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                A[i, j] = gaussian_kl(gaussians[i], gaussians[j])
    return A.T if transpose else A


def kl_graph(gaussians, c: float, transpose=False, names=None) -> Digraph:
    """Asymmetrize the divergence table, dropping pairs closer than c."""
    if c < 0:
        raise ValueError(f"threshold must be nonnegative, got {c}")
    return asymmetrize(kl_matrix(gaussians, transpose), names=names, min_gap=c)


# The five diagonal Gaussians whose KL table asymmetrizes to a cyclic graph
# at threshold 1: the classical witness that divergence scores, unlike
# conditional probabilities, do not induce an order.
CYCLE_GAUSSIANS = (
    DiagGaussian((-5.0, -3.0), (3.0, 7.0)),
    DiagGaussian((-3.0, 5.0), (7.0, 4.0)),
    DiagGaussian((-5.0, -6.0), (8.0, 1.0)),
    DiagGaussian((-7.0, 6.0), (5.0, 5.0)),
    DiagGaussian((9.0, 3.0), (5.0, 9.0)),
)


def oe_energy_matrix(vectors) -> np.ndarray:
    """Pairwise order-violation energies E[i][j] = ||max(0, x_j - x_i)||^2.

    E[i][j] is zero exactly when x_i dominates x_j coordinate-wise, the
    order-embedding criterion for i being the more general concept.
    """
    x = np.asarray(vectors, dtype=float)
    diff = np.maximum(x[None, :, :] - x[:, None, :], 0.0)
    return np.sum(diff * diff, axis=2)
