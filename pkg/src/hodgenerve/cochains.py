"""Cech cochains, the coboundary and the combinatorial Laplacian.

All matrices are integer valued and indexed by the lexicographic order of
the simplex lists of a :class:`~hodgenerve.nerve.Nerve`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .nerve import Nerve


@dataclass(frozen=True)
class Cochain:
    degree: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def zeros(cls, nerve: Nerve, q: int) -> "Cochain":
        return cls(q, np.zeros(nerve.size(q)))

    @classmethod
    def basis(cls, nerve: Nerve, q: int, simplex) -> "Cochain":
        c = np.zeros(nerve.size(q))
        c[nerve.index(q)[tuple(simplex)]] = 1.0
        return cls(q, c)

    def check(self, nerve: Nerve) -> "Cochain":
        if len(self.values) != nerve.size(self.degree):
            raise ValueError(f"{self.degree}-cochain has {len(self.values)} values, "
                             f"nerve has {nerve.size(self.degree)} simplices")
        return self


@dataclass(frozen=True)
class CoboundaryMatrix:
    """delta_q as a sparse |S_{q+1}| x |S_q| matrix with entries in {-1, 0, 1}."""

    degree: int
    matrix: sp.csr_matrix

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def row_nnz(self) -> np.ndarray:
        return np.diff(self.matrix.indptr)

    def col_nnz(self) -> np.ndarray:
        return np.bincount(self.matrix.indices, minlength=self.shape[1])


@dataclass(frozen=True)
class LaplacianMatrix:
    degree: int
    matrix: np.ndarray
    up: np.ndarray
    down: np.ndarray
    has_up: bool
    has_down: bool


def coboundary_matrix(nerve: Nerve, q: int) -> CoboundaryMatrix:
    """Entry (I, J) is (-1)^j when J is I with its j-th vertex removed."""
    if q < 0:
        raise ValueError(f"negative degree {q}")
    if not nerve.has(q + 1):
        raise ValueError(f"delta_{q} needs S_{q + 1}, beyond qmax={nerve.qmax}")
    rows_S = nerve.S(q + 1)
    col_idx = nerve.index(q)
    n_rows, n_cols = len(rows_S), nerve.size(q)
    rows, cols, vals = [], [], []
    for r, I in enumerate(rows_S):
        for j in range(len(I)):
            rows.append(r)
            cols.append(col_idx[I[:j] + I[j + 1:]])
            vals.append(-1 if j % 2 else 1)
    M = sp.csr_matrix((np.asarray(vals, dtype=np.int64), (rows, cols)),
                      shape=(n_rows, n_cols), dtype=np.int64)
    return CoboundaryMatrix(q, M)


def signature_coboundary(nerve: Nerve, q: int) -> np.ndarray:
    """Dense delta_q from the signature form: the sign of the permutation
    sorting (i, I minus i) into I.  Used to cross-check the sign convention."""
    rows_S = nerve.S(q + 1)
    col_idx = nerve.index(q)
    D = np.zeros((len(rows_S), nerve.size(q)), dtype=np.int64)
    for r, I in enumerate(rows_S):
        for i in I:
            rest = tuple(x for x in I if x != i)
            seq = (i,) + rest
            inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
            D[r, col_idx[rest]] = -1 if inversions % 2 else 1
    return D


def apply_delta(mat: CoboundaryMatrix, c: Cochain) -> Cochain:
    if c.degree != mat.degree:
        raise ValueError(f"delta_{mat.degree} applied to a {c.degree}-cochain")
    if len(c) != mat.shape[1]:
        raise ValueError(f"cochain length {len(c)} does not match delta_{mat.degree} width {mat.shape[1]}")
    return Cochain(c.degree + 1, mat.matrix @ c.values)


def inner_product(c1: Cochain, c2: Cochain) -> float:
    if c1.degree != c2.degree:
        raise ValueError(f"inner product of a {c1.degree}- and a {c2.degree}-cochain")
    if len(c1) != len(c2):
        raise ValueError("cochains of different lengths")
    return float(c1.values @ c2.values)


def gram_up(nerve: Nerve, q: int) -> np.ndarray:
    """delta_q^T delta_q (dense, integer)."""
    d = coboundary_matrix(nerve, q).matrix
    return (d.T @ d).toarray()


def gram_down(nerve: Nerve, q: int) -> np.ndarray:
    """delta_{q-1} delta_{q-1}^T (dense, integer); zero at q = 0."""
    if q == 0:
        n = nerve.size(0)
        return np.zeros((n, n), dtype=np.int64)
    d = coboundary_matrix(nerve, q - 1).matrix
    return (d @ d.T).toarray()


def laplacian_matrix(nerve: Nerve, q: int) -> LaplacianMatrix:
    """delta_q^T delta_q + delta_{q-1} delta_{q-1}^T; the cochain basis is
    orthonormal, so adjoints are transposes."""
    up = gram_up(nerve, q)
    down = gram_down(nerve, q)
    return LaplacianMatrix(q, up + down, up, down, nerve.size(q + 1) > 0, q > 0)


def delta_squared(nerve: Nerve, q: int) -> sp.csr_matrix:
    """delta_{q+1} delta_q as an exact integer sparse matrix."""
    return coboundary_matrix(nerve, q + 1).matrix @ coboundary_matrix(nerve, q).matrix
