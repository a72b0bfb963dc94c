"""Dense symmetric eigensolvers."""
from __future__ import annotations

import numpy as np

# Above this size the cyclic Jacobi sweep (O(n) numpy calls per rotation) is
# too slow for nerve Laplacians; LAPACK's syevd is used instead.
JACOBI_MAX_SIZE = 96


class EigenError(RuntimeError):
    pass


def _check_symmetric(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(float(np.abs(A).max(initial=0.0)), 1.0)
    if np.abs(A - A.T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")


def jacobi_eigh(A, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi rotations until every off-diagonal entry is below
    ``tol`` times the Frobenius norm."""
    A = np.array(A, dtype=float)
    _check_symmetric(A)
    n = A.shape[0]
    V = np.eye(n)
    fro = float(np.linalg.norm(A))
    if n < 2 or fro == 0.0:
        return _sorted(np.diag(A).copy(), V)
    thresh = tol * fro
    for _ in range(max_sweeps):
        off = np.abs(A - np.diag(np.diag(A))).max()
        if off < thresh:
            return _sorted(np.diag(A).copy(), V)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < thresh:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    raise EigenError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")


def _sorted(w: np.ndarray, V: np.ndarray):
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def residual_max(A, w, V) -> float:
    """max_k ||A v_k - w_k v_k||."""
    if len(w) == 0:
        return 0.0
    R = np.asarray(A, dtype=float) @ V - V * w
    return float(np.linalg.norm(R, axis=0).max())


def symmetric_eigen(A, tol: float = 1e-14, method: str = "auto", max_sweeps: int = 100):
    """Sorted eigenvalues and orthonormal eigenvectors of a real symmetric matrix.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    :data:`JACOBI_MAX_SIZE`).  Every pair is checked against
    ``||A v - w v|| <= 1e-8 ||A||``.
    """
    A = np.asarray(A, dtype=float)
    _check_symmetric(A)
    n = A.shape[0]
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_SIZE else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(A, tol=tol, max_sweeps=max_sweeps)
    elif method == "lapack":
        if n == 0:
            return np.zeros(0), np.zeros((0, 0))
        w, V = np.linalg.eigh(A)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    norm = float(np.abs(w).max(initial=0.0))
    res = residual_max(A, w, V)
    if res > 1e-8 * max(norm, 1e-300) and res > 1e-300:
        raise EigenError(f"eigenpair residual {res:.3e} exceeds 1e-8 * ||A|| = {1e-8 * norm:.3e}")
    return w, V
