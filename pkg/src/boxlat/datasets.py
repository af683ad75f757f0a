"""Dataset construction: toy ontology, hierarchies, CPDs, and negatives.

Two pipelines produce training targets.  The toy pipeline aggregates a
small weighted leaf table into exact marginals and pairwise conditionals.
The hierarchy pipeline ingests child->parent edge lists, takes transitive
closures, assigns node marginals by descendant counts, derives approximate
joint probabilities from leaf ancestor-set co-occurrence, prunes the
resulting conditionals into soft edges, and corruption-samples negatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .cpd import CpdTable
from .errors import CycleError, DataFormatError
from .training import TrainExample


@dataclass
class Hierarchy:
    """DAG of child -> parent edges with a designated leaf set."""

    nodes: list[str]
    edges: set
    leaves: set = None

    def __post_init__(self):
        self.nodes = list(self.nodes)
        known = set(self.nodes)
        self.edges = {(str(c), str(p)) for (c, p) in self.edges}
        for (c, p) in self.edges:
            if c not in known or p not in known:
                raise ValueError(f"edge ({c!r}, {p!r}) references unknown node")
            if c == p:
                raise ValueError(f"self-edge at {c!r}")
        if self.leaves is None:
            parents = {p for (_, p) in self.edges}
            self.leaves = {n for n in self.nodes if n not in parents}
        else:
            self.leaves = set(self.leaves)
            missing = self.leaves - known
            if missing:
                raise ValueError(f"designated leaves not in node set: {sorted(missing)}")

    @classmethod
    def from_edges(cls, edges, leaves=None):
        edges = list(edges)
        nodes = []
        seen = set()
        for pair in edges:
            for n in pair:
                if n not in seen:
                    seen.add(n)
                    nodes.append(n)
        return cls(nodes, set(edges), leaves)


def _ancestor_sets(h: Hierarchy, include_self: bool):
    """Per-node ancestor sets over child->parent edges, iteratively.

    Raises CycleError with a witness path if the edge set has a cycle.
    """
    parents = {n: [] for n in h.nodes}
    for (c, p) in sorted(h.edges):
        parents[c].append(p)
    anc = {}
    state = {}  # 1 = in progress, 2 = done
    for root in h.nodes:
        if state.get(root) == 2:
            continue
        stack = [root]
        path = []
        while stack:
            node = stack[-1]
            if state.get(node) is None:
                state[node] = 1
                path.append(node)
                for p in parents[node]:
                    if state.get(p) == 1:
                        cycle = path[path.index(p) :]
                        raise CycleError(cycle)
                    if state.get(p) is None:
                        stack.append(p)
            else:
                stack.pop()
                if state[node] == 1:
                    state[node] = 2
                    path.pop()
                    acc = set()
                    for p in parents[node]:
                        acc.add(p)
                        acc |= anc[p]
                    anc[node] = acc
    if include_self:
        return {n: anc[n] | {n} for n in h.nodes}
    return anc


def transitive_closure(h: Hierarchy) -> set:
    """All (u, v) pairs with a directed path u -> ... -> v; idempotent."""
    anc = _ancestor_sets(h, include_self=False)
    return {(u, v) for u, vs in anc.items() for v in vs}


def node_marginals(h: Hierarchy, include_self=True) -> dict:
    """P(n) = |descendants(n)| / |nodes|, counting n itself by default.

    Without self-inclusion leaves get probability zero, which no
    cross-entropy target can use, hence the default.
    """
    anc = _ancestor_sets(h, include_self=include_self)
    counts = {n: 0 for n in h.nodes}
    for u in h.nodes:
        for v in anc[u]:
            counts[v] += 1
    total = len(h.nodes)
    return {n: counts[n] / total for n in h.nodes}


def leaf_cooccurrence_cpd(h: Hierarchy, include_self=True) -> CpdTable:
    """Approximate CPD: leaf ancestor-set joints over descendant marginals.

    P(x, y) counts the leaves whose (self-inclusive) ancestor set contains
    both x and y, normalized by the leaf count; unary marginals come from
    node_marginals.  The mixed normalizations keep joint symmetry exact
    but can push individual conditionals past 1 on unbalanced graphs.
    """
    if not h.leaves:
        raise ValueError("hierarchy has no leaves")
    anc = _ancestor_sets(h, include_self=include_self)
    names = list(h.nodes)
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    joint = np.zeros((n, n))
    for leaf in sorted(h.leaves):
        ids = sorted(index[a] for a in anc[leaf])
        for i in ids:
            joint[i, ids] += 1.0
    joint /= len(h.leaves)
    marg = node_marginals(h, include_self=include_self)
    p = np.array([marg[nm] for nm in names])
    cond = joint / p[None, :]
    np.fill_diagonal(cond, 1.0)
    return CpdTable(names, p, cond)


def prune_cpd(table: CpdTable, hi=0.6, lo=0.4):
    """Soft edges (t1, t2, P(t1|t2)) with a confident direction.

    An ordered pair survives iff P(t1|t2) >= hi and the reverse
    conditional P(t2|t1) <= lo.  Emitted targets are capped at 1, since
    the mixed leaf/descendant normalization of the co-occurrence table
    can push raw conditionals slightly past it.
    """
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"need 0 <= lo <= hi <= 1, got lo={lo}, hi={hi}")
    out = []
    n = len(table)
    for i in range(n):
        for j in range(n):
            if i != j and table.cond[i, j] >= hi and table.cond[j, i] <= lo:
                p = min(float(table.cond[i, j]), 1.0)
                out.append((table.names[i], table.names[j], p))
    return out


def corrupt_negatives(edges, k, seed, known=None, vocab=None, max_tries=100):
    """Positive pair examples plus k corrupted negatives per edge.

    Each corruption replaces one endpoint (chosen uniformly) of (u, v)
    with a uniformly random node, rejecting self-pairs and any pair in the
    known-positive set (defaults to the input edges).  Negative examples
    carry target 0 and the is_negative flag.
    """
    edges = list(edges)
    known = set(known) if known is not None else set(edges)
    if vocab is None:
        vocab = sorted({n for e in edges for n in e})
    else:
        vocab = list(vocab)
    if k > 0 and len(vocab) < 2:
        raise ValueError("vocabulary too small to corrupt")
    rng = np.random.default_rng(seed)
    out = []
    for (u, v) in edges:
        out.append(TrainExample.pair(v, u, 1.0))
        for _ in range(k):
            for attempt in range(max_tries):
                side = rng.integers(2)
                node = vocab[rng.integers(len(vocab))]
                cand = (node, v) if side == 0 else (u, node)
                if cand[0] != cand[1] and cand not in known:
                    out.append(TrainExample.pair(cand[1], cand[0], 0.0, is_negative=True))
                    break
            else:
                raise ValueError(
                    f"could not corrupt edge ({u!r}, {v!r}) in {max_tries} tries"
                )
    return out


@dataclass
class ToySpec:
    """Weighted leaf table: each row is (weight, set of concepts)."""

    leaves: list
    tol: float = 1e-9

    def __post_init__(self):
        self.leaves = [(float(w), frozenset(cs)) for (w, cs) in self.leaves]
        if not self.leaves:
            raise ValueError("toy spec needs at least one leaf")
        if any(w <= 0 for (w, _) in self.leaves):
            raise ValueError("leaf weights must be positive")
        total = sum(w for (w, _) in self.leaves)
        if abs(total - 1.0) > self.tol:
            raise ValueError(f"leaf weights must sum to 1, got {total}")
        if any(not cs for (_, cs) in self.leaves):
            raise ValueError("every leaf needs at least one concept")

    @property
    def vocabulary(self):
        names = set()
        for (_, cs) in self.leaves:
            names |= cs
        return sorted(names)


def toy_dataset(spec: ToySpec) -> CpdTable:
    """Exact CPD aggregated from the weighted leaf table.

    p(a) sums the weights of leaves containing a; joints likewise over
    leaves containing both concepts; conditionals by division.
    """
    names = spec.vocabulary
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    joint = np.zeros((n, n))
    for (w, cs) in spec.leaves:
        ids = sorted(index[c] for c in cs)
        for i in ids:
            joint[i, ids] += w
    p = np.diag(joint).copy()
    cond = joint / p[None, :]
    return CpdTable(names, p, cond)


def cpd_examples(table: CpdTable, skip_diagonal=True):
    """Unary and pairwise training examples reading the table verbatim."""
    out = [TrainExample.unary(nm, table.marginals[i]) for i, nm in enumerate(table.names)]
    for j, b in enumerate(table.names):
        for i, a in enumerate(table.names):
            if skip_diagonal and i == j:
                continue
            out.append(TrainExample.pair(a, b, float(np.clip(table.cond[i, j], 0.0, 1.0))))
    return out


def default_toy() -> ToySpec:
    """The shipped 19-concept ontology over 12 weighted leaf examples."""
    text = resources.files("boxlat").joinpath("data/toy_leaves.tsv").read_text("utf-8")
    return parse_toy(text, path="boxlat/data/toy_leaves.tsv")


def parse_toy(text, path="<string>") -> ToySpec:
    leaves = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataFormatError(
                f"expected 'weight<TAB>concept,concept,...', got {line!r}", path, ln
            )
        try:
            w = float(parts[0])
        except ValueError as exc:
            raise DataFormatError(str(exc), path, ln) from None
        concepts = [c.strip() for c in parts[1].split(",") if c.strip()]
        leaves.append((w, frozenset(concepts)))
    return ToySpec(leaves)


def save_edges_tsv(path, edges):
    """Write `child<TAB>parent` lines, sorted for reproducibility."""
    with open(path, "w", encoding="utf-8") as fh:
        for (c, p) in sorted(edges):
            fh.write(f"{c}\t{p}\n")


def load_edges_tsv(path):
    edges = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise DataFormatError(f"expected 'child<TAB>parent', got {line!r}", path, ln)
            edges.append((parts[0], parts[1]))
    return edges


def save_soft_edges_tsv(path, soft_edges):
    with open(path, "w", encoding="utf-8") as fh:
        for (t1, t2, p) in soft_edges:
            fh.write(f"{t1}\t{t2}\t{'%.12g' % p}\n")


def load_soft_edges_tsv(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise DataFormatError(
                    f"expected 't1<TAB>t2<TAB>prob', got {line!r}", path, ln
                )
            try:
                out.append((parts[0], parts[1], float(parts[2])))
            except ValueError as exc:
                raise DataFormatError(str(exc), path, ln) from None
    return out


def random_hierarchy(n_nodes, seed, extra_parent_prob=0.1):
    """Random rooted DAG: node i attaches under a uniform earlier node,
    occasionally gaining a second parent.  Node names are n0..n{k-1}."""
    if n_nodes < 1:
        raise ValueError("need at least one node")
    rng = np.random.default_rng(seed)
    names = [f"n{i}" for i in range(n_nodes)]
    edges = set()
    for i in range(1, n_nodes):
        j = int(rng.integers(i))
        edges.add((names[i], names[j]))
        if rng.uniform() < extra_parent_prob and i > 1:
            j2 = int(rng.integers(i))
            if j2 != j:
                edges.add((names[i], names[j2]))
    return Hierarchy(names, edges)


def split_closure(closure, n_dev, n_test, seed):
    """Deterministic (train, dev, test) split of a closure edge set."""
    edges = sorted(closure)
    if n_dev + n_test >= len(edges):
        raise ValueError("closure too small for the requested split")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(edges))
    dev = [edges[i] for i in order[:n_dev]]
    test = [edges[i] for i in order[n_dev : n_dev + n_test]]
    train = [edges[i] for i in order[n_dev + n_test :]]
    return train, dev, test
