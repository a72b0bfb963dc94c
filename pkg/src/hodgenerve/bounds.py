"""Audits of the explicit quantitative bounds on coboundaries and their
bounded right inverses.

Every audit returns a :class:`BoundReport`.  Astronomically large right-hand
sides are compared through natural logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import rational as rq
from .cochains import coboundary_matrix, gram_up
from .linalg import symmetric_eigen
from .nerve import Nerve, nerve_stats
from .spectra import positive_part


@dataclass(frozen=True)
class BoundReport:
    bound: str
    lhs: float
    rhs_log: float
    passed: bool
    instance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def rhs(self) -> float:
        try:
            return math.exp(self.rhs_log)
        except OverflowError:
            return math.inf

    def as_dict(self) -> dict:
        return {"bound": self.bound, "lhs": self.lhs, "rhs_log": self.rhs_log,
                "pass": self.passed, "instance": self.instance, **self.details}


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def delta_norm_audit(nerve: Nerve, q: int, nu: int | None = None) -> BoundReport:
    """lambda_max(delta_q^T delta_q) <= (q + 2) nu."""
    nu = nerve_stats(nerve).nu if nu is None else nu
    G = gram_up(nerve, q)
    lmax = float(symmetric_eigen(G)[0].max(initial=0.0)) if G.size else 0.0
    rhs = (q + 2) * nu
    return BoundReport("delta_norm", lmax, _log(rhs), lmax <= rhs * (1 + 1e-12),
                       {"q": q, "nu": nu, "n_cols": nerve.size(q)}, {"rhs": rhs})


def rayleigh_audit(nerve: Nerve, q: int, trials: int, rng, nu: int | None = None) -> BoundReport:
    """||delta b||^2 <= (q + 2) nu ||b||^2 on random cochains b."""
    nu = nerve_stats(nerve).nu if nu is None else nu
    d = coboundary_matrix(nerve, q).matrix
    worst = 0.0
    for _ in range(trials):
        b = rng.standard_normal(d.shape[1])
        bb = float(b @ b)
        if bb == 0:
            continue
        db = d @ b
        worst = max(worst, float(db @ db) / bb)
    rhs = (q + 2) * nu
    return BoundReport("delta_rayleigh", worst, _log(rhs), worst <= rhs * (1 + 1e-12),
                       {"q": q, "nu": nu, "trials": trials}, {"rhs": rhs})


def lower_bound_audit(nerve: Nerve, p: int, coexact=None, nu: int | None = None) -> BoundReport:
    """First coexact eigenvalue >= 1 / (|S_{p+1}| K^{|S_{p+1}|}), K = max(nu, p+2)."""
    nu = nerve_stats(nerve).nu if nu is None else nu
    n_rows = nerve.size(p + 1)
    K = max(nu, p + 2)
    inst = {"p": p, "nu": nu, "K": K, "n_simplices_next": n_rows}
    if coexact is None:
        coexact = positive_part(symmetric_eigen(gram_up(nerve, p))[0]) if n_rows else np.zeros(0)
    if n_rows == 0 or len(coexact) == 0:
        return BoundReport("coexact_lower_bound", math.nan, math.nan, True, inst, {"vacuous": True})
    lhs = float(np.min(coexact))
    rhs_log = -(math.log(n_rows) + n_rows * math.log(K))
    return BoundReport("coexact_lower_bound", lhs, rhs_log, _log(lhs) >= rhs_log, inst,
                       {"vacuous": False, "log_gap": _log(lhs) - rhs_log})


@dataclass(frozen=True)
class TrevesInstance:
    """A {-1, 0, 1} matrix A with the right inverse B built from its first
    independent columns, plus the Gram matrix P of those columns."""

    A: tuple[tuple[int, ...], ...]
    k: int
    kept: tuple[int, ...]
    B: tuple[tuple[Fraction, ...], ...]
    P: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def m(self) -> int:
        return len(self.A[0]) if self.A else 0

    @property
    def r(self) -> int:
        return len(self.kept)

    @property
    def Q(self) -> list[list[int]]:
        return [list(row[1:]) for row in self.P[1:]]

    def B_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.B]).reshape(self.m, self.n)

    def apply_B(self, u) -> list[Fraction]:
        return rq.matvec(self.B, [Fraction(x) for x in u])

    def describe(self) -> dict:
        return {"n": self.n, "m": self.m, "k": self.k, "r": self.r, "kept_columns": list(self.kept)}


def sparsity(A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    nz = A != 0
    return int(max(nz.sum(axis=1).max(), nz.sum(axis=0).max()))


def treves_operator(A, k: int | None = None) -> TrevesInstance:
    """B = E_K P^{-1} A_K^T with A_K the lexicographically first independent
    columns and P = A_K^T A_K.

    On Im(A) this returns the coordinates in the kept basis, placed at the
    kept positions; on Im(A)^perp it vanishes since A_K^T kills it.
    """
    A = [[int(x) for x in row] for row in np.asarray(A).tolist()]
    if any(x not in (-1, 0, 1) for row in A for x in row):
        raise ValueError("entries must lie in {-1, 0, 1}")
    n, m = rq.shape(A)
    k = sparsity(A) if k is None else int(k)
    if sparsity(A) > k:
        raise ValueError(f"matrix has a row or column with more than k={k} nonzeros")
    kept = rq.independent_columns(A)
    AK = [[A[i][j] for j in kept] for i in range(n)]
    P = [[sum(AK[i][a] * AK[i][b] for i in range(n)) for b in range(len(kept))] for a in range(len(kept))]
    if kept:
        coords = rq.matmul(rq.inverse(P), rq.transpose(AK))  # r x n
    else:
        coords = []
    B = [[Fraction(0)] * n for _ in range(m)]
    for a, j in enumerate(kept):
        B[j] = list(coords[a])
    inst = TrevesInstance(tuple(map(tuple, A)), k, tuple(kept),
                          tuple(map(tuple, B)), tuple(map(tuple, P)))
    verify_treves(inst)
    return inst


def verify_treves(inst: TrevesInstance) -> None:
    """ABA = A exactly, and B annihilates Im(A)^perp (i.e. B = B A A^+)."""
    A = [list(map(Fraction, row)) for row in inst.A]
    B = [list(row) for row in inst.B]
    if inst.n == 0 or inst.m == 0:
        return
    if rq.matmul(rq.matmul(A, B), A) != A:
        raise AssertionError("ABA != A")
    # B vanishes on ker(A^T) = Im(A)^perp  <=>  rows of B lie in Im(A)
    for row in B:
        aug = [A[i] + [row[i]] for i in range(inst.n)]
        if rq.rank(aug) != len(inst.kept):
            raise AssertionError("B does not vanish on the orthogonal complement of Im(A)")


def treves_norm_audit(inst: TrevesInstance) -> BoundReport:
    """||B||^2 <= n k^(2n), compared in log space."""
    Bf = inst.B_float()
    lhs = float(symmetric_eigen(Bf.T @ Bf)[0].max()) if Bf.size else 0.0
    k = max(inst.k, 1)
    rhs_log = math.log(inst.n) + 2 * inst.n * math.log(k) if inst.n else -math.inf
    return BoundReport("treves_norm", lhs, rhs_log, _log(lhs) <= rhs_log + 1e-12,
                       inst.describe(), {"ratio_to_n": lhs / inst.n if inst.n else 0.0})


MINOR_ENUMERATION_MAX_R = 12


def gram_minor_audit(inst: TrevesInstance, lmax: int) -> BoundReport:
    """Every l x l minor of P is at most k^(2l-1) in absolute value, l <= lmax,
    by exhaustive enumeration; plus |det P| >= 1 and the projection bound
    |det P| / |det Q| >= k^(-2n)."""
    r = inst.r
    if r > MINOR_ENUMERATION_MAX_R:
        raise ValueError(f"r={r} too large for exhaustive minor enumeration")
    lmax = min(lmax, r)
    k = max(inst.k, 1)
    P = [list(row) for row in inst.P]
    per_l = []
    ok = True
    for l in range(1, lmax + 1):
        worst = 0
        for rows in combinations(range(r), l):
            for cols in combinations(range(r), l):
                worst = max(worst, abs(rq.bareiss_det(rq.submatrix(P, rows, cols))))
        bound = k ** (2 * l - 1)
        per_l.append({"l": l, "max_minor": worst, "bound": bound, "pass": worst <= bound})
        ok &= worst <= bound
    details = {"minors": per_l}
    if r:
        detP = rq.bareiss_det(P)
        detQ = rq.bareiss_det(inst.Q)
        proj = Fraction(abs(detP), abs(detQ)) if detQ else None
        proj_ok = proj is not None and proj >= Fraction(1, k ** (2 * inst.n))
        details.update({"det_P": detP, "det_Q": detQ,
                        "projection_sq": str(proj), "projection_ok": proj_ok})
        ok &= abs(detP) >= 1 and proj_ok
    lhs = max((e["max_minor"] for e in per_l), default=0)
    rhs_log = (2 * lmax - 1) * math.log(k) if lmax else 0.0
    return BoundReport("gram_minors", float(lhs), rhs_log, bool(ok), inst.describe(), details)


def bidiagonal(m: int) -> list[list[int]]:
    """(m-1) x m matrix with 1 on the diagonal and -1 just right of it."""
    return [[1 if j == i else -1 if j == i + 1 else 0 for j in range(m)] for i in range(m - 1)]


def treves_counterexample(m: int, slope: float = 10.0) -> dict:
    """||BAv||^2 / ||Av||^2 for the bidiagonal A and v = (1, ..., m)."""
    if m < 2:
        raise ValueError("m must be at least 2")
    inst = treves_operator(bidiagonal(m))
    v = [Fraction(i) for i in range(1, m + 1)]
    Av = rq.matvec([list(map(Fraction, row)) for row in inst.A], v)
    BAv = inst.apply_B(Av)
    av2 = sum(x * x for x in Av)
    bav2 = sum(x * x for x in BAv)
    ratio = bav2 / av2
    expected = Fraction(m * (2 * m - 1), 6)
    return {
        "m": m,
        "Av": Av,
        "BAv": BAv,
        "norm_Av_sq": av2,
        "norm_BAv_sq": bav2,
        "ratio": ratio,
        "expected_ratio": expected,
        "exact_match": ratio == expected and av2 == m - 1,
        "linear_reference": slope * m,
        "exceeds_linear": ratio > slope * m,
    }


def random_sign_matrix(rng, n: int, m: int, k: int, density: float = 0.5) -> np.ndarray:
    """Random {-1, 0, 1} matrix with at most k nonzeros per row and column."""
    A = np.zeros((n, m), dtype=int)
    rows = np.zeros(n, dtype=int)
    cols = np.zeros(m, dtype=int)
    cells = [(i, j) for i in range(n) for j in range(m)]
    for t in rng.permutation(len(cells)):
        i, j = cells[t]
        if rows[i] < k and cols[j] < k and rng.random() < density:
            A[i, j] = 1 if rng.random() < 0.5 else -1
            rows[i] += 1
            cols[j] += 1
    return A


def coboundary_sparsity_ok(nerve: Nerve, q: int, nu: int | None = None) -> bool:
    """delta_q has at most max(nu, q+2) nonzeros in every row and column."""
    nu = nerve_stats(nerve).nu if nu is None else nu
    d = coboundary_matrix(nerve, q)
    K = max(nu, q + 2)
    return bool(np.all(d.row_nnz() <= K) and np.all(d.col_nnz() <= K))
