"""Pairwise conditional probability tables over named Bernoulli variables.

A table holds unary marginals p_i and a dense matrix C[i, j] = P(x_i | x_j)
(diagonal ignored).  Joint consistency C[i, j] p_j = C[j, i] p_i ties the
two together; tables built from actual distributions satisfy it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError

_FMT = "%.12g"


@dataclass
class CpdTable:
    names: list[str]
    marginals: np.ndarray
    cond: np.ndarray

    def __post_init__(self):
        self.names = list(self.names)
        self.marginals = np.asarray(self.marginals, dtype=float)
        self.cond = np.asarray(self.cond, dtype=float)
        n = len(self.names)
        if self.marginals.shape != (n,):
            raise ValueError(f"need {n} marginals, got {self.marginals.shape}")
        if self.cond.shape != (n, n):
            raise ValueError(f"need a {n}x{n} matrix, got {self.cond.shape}")

    def __len__(self):
        return len(self.names)

    def joint(self) -> np.ndarray:
        """Matrix of joints P(x_i, x_j) = C[i, j] p_j."""
        return self.cond * self.marginals[None, :]

    def check(self, tol=1e-9):
        """Raise unless conditionals are in range and joints symmetric."""
        if np.any(self.cond < -tol) or np.any(self.cond > 1.0 + tol):
            raise ValueError("conditional probabilities outside [0, 1]")
        j = self.joint()
        np.fill_diagonal(j, 0.0)
        gap = np.max(np.abs(j - j.T)) if len(self) else 0.0
        if gap > tol:
            raise ValueError(f"inconsistent table: joint asymmetry {gap:g} > {tol:g}")
        return self

    def conditional(self, a: str, b: str) -> float:
        return float(self.cond[self.names.index(a), self.names.index(b)])

    def marginal(self, a: str) -> float:
        return float(self.marginals[self.names.index(a)])


def save_matrix_tsv(path, names, matrix):
    """Score matrix TSV: header row of ids, then one id-prefixed row each."""
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\t" + "\t".join(names) + "\n")
        for name, row in zip(names, matrix):
            fh.write(name + "\t" + "\t".join(_FMT % v for v in row) + "\n")


def load_matrix_tsv(path):
    """Inverse of save_matrix_tsv; returns (names, matrix)."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise DataFormatError("empty score matrix", path, 1)
    names = lines[0].split("\t")[1:]
    if not names:
        raise DataFormatError("header must list variable ids", path, 1)
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(names) + 1:
            raise DataFormatError(
                f"expected {len(names) + 1} columns, got {len(parts)}", path, ln
            )
        if parts[0] != names[len(rows)]:
            raise DataFormatError(
                f"row id {parts[0]!r} does not match header order", path, ln
            )
        try:
            rows.append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise DataFormatError(str(exc), path, ln) from None
    if len(rows) != len(names):
        raise DataFormatError(
            f"expected {len(names)} rows, got {len(rows)}", path, len(lines)
        )
    return names, np.array(rows)


def save_marginals_tsv(path, names, marginals):
    with open(path, "w", encoding="utf-8") as fh:
        for name, p in zip(names, marginals):
            fh.write(f"{name}\t{_FMT % p}\n")


def load_marginals_tsv(path):
    names, probs = [], []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise DataFormatError(f"expected 'concept<TAB>prob', got {line!r}", path, ln)
            names.append(parts[0])
            try:
                probs.append(float(parts[1]))
            except ValueError as exc:
                raise DataFormatError(str(exc), path, ln) from None
    return names, np.array(probs)


def save_cpd(matrix_path, marginals_path, table: CpdTable):
    save_matrix_tsv(matrix_path, table.names, table.cond)
    save_marginals_tsv(marginals_path, table.names, table.marginals)


def load_cpd(matrix_path, marginals_path) -> CpdTable:
    names, cond = load_matrix_tsv(matrix_path)
    mnames, marginals = load_marginals_tsv(marginals_path)
    if mnames != names:
        raise DataFormatError(
            "marginal ids do not match matrix header", marginals_path
        )
    return CpdTable(names, marginals, cond)
