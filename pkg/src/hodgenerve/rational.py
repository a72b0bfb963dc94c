"""Exact linear algebra over the rationals (``fractions.Fraction``).

Matrices are lists of row lists.  Determinants of integer matrices use
Bareiss' fraction-free elimination, so intermediate values stay integers.
"""
from __future__ import annotations

from fractions import Fraction


def to_fraction_matrix(A) -> list[list[Fraction]]:
    return [[Fraction(int(x)) if float(x).is_integer() else Fraction(x) for x in row] for row in A]


def shape(A) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def transpose(A):
    n, m = shape(A)
    return [[A[i][j] for i in range(n)] for j in range(m)]


def matmul(A, B):
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"cannot multiply {n}x{k} by {k2}x{m}")
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum((a * x for a, x in zip(row, v) if a and x), Fraction(0)) for row in A]


def bareiss_det(M) -> int:
    """Determinant of a square integer matrix, fraction-free."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                A[i][j] = (A[i][j] * akk - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def independent_columns(A) -> list[int]:
    """Left-to-right scan keeping each column independent of those kept."""
    n, m = shape(A)
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot row, reduced vector)
    kept = []
    for j in range(m):
        v = [Fraction(A[i][j]) for i in range(n)]
        for piv, b in basis:
            if v[piv]:
                f = v[piv] / b[piv]
                v = [x - f * y for x, y in zip(v, b)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is not None:
            basis.append((piv, v))
            kept.append(j)
    return kept


def rank(A) -> int:
    return len(independent_columns(A))


def inverse(A) -> list[list[Fraction]]:
    """Gauss-Jordan inverse; raises on a singular matrix."""
    n, m = shape(A)
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def submatrix(A, rows, cols):
    return [[A[i][j] for j in cols] for i in rows]
