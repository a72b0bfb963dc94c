"""Smallest enclosing balls and minimum-norm points of small point sets.

Both routines are deterministic: no shuffling, and the move-to-front order
depends only on the input order.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

_REL_TOL = 1e-12


def _ball_from_support(support: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with every support point on its boundary.

    The center lies in the affine hull of the support; solved from the
    Gram system of the edge vectors.
    """
    if not support:
        return np.zeros(0), -1.0
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    E = np.array([p - p0 for p in support[1:]])
    G = 2.0 * E @ E.T
    rhs = np.einsum("ij,ij->i", E, E)
    lam, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    center = p0 + lam @ E
    radius = max(float(np.linalg.norm(p - center)) for p in support)
    return center, radius


def _inside(center: np.ndarray, radius: float, p: np.ndarray) -> bool:
    if radius < 0:
        return False
    d = float(np.linalg.norm(p - center))
    return d <= radius * (1.0 + _REL_TOL) + 1e-15


def _mtf(points: list[np.ndarray], n: int, support: list[np.ndarray], dim: int):
    center, radius = _ball_from_support(support)
    if len(support) == dim + 1:
        return center, radius
    i = 0
    while i < n:
        p = points[i]
        if not _inside(center, radius, p):
            center, radius = _mtf(points, i, support + [p], dim)
            # move-to-front keeps hard points early for later passes
            points.insert(0, points.pop(i))
        i += 1
    return center, radius


def min_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest Euclidean ball containing ``points``.

    Welzl's move-to-front recursion, run in the given order.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("min_enclosing_ball needs at least one point")
    dim = pts.shape[1]
    work = [row.copy() for row in pts]
    return _mtf(work, len(work), [], dim)


def _affine_projection_of_origin(S: np.ndarray):
    """Project the origin onto aff(S); return (point, barycentric weights)."""
    p0 = S[0]
    if len(S) == 1:
        return p0.copy(), np.ones(1)
    E = S[1:] - p0
    G = E @ E.T
    if abs(np.linalg.det(G)) <= 1e-14 * max(1.0, float(np.trace(G))) ** len(E):
        return None, None
    lam = np.linalg.solve(G, -(E @ p0))
    w = np.concatenate([[1.0 - lam.sum()], lam])
    return p0 + lam @ E, w


def min_norm_point(points, max_face: int | None = None) -> np.ndarray:
    """Point of minimum Euclidean norm in the convex hull of ``points``.

    Enumerates faces with at most ``dim + 1`` vertices (Caratheodory); exact
    up to floating point for the small sets used here.  Callers that know the
    origin is outside the hull may pass ``max_face = dim``, since the answer
    then lies on a proper face.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    dim = pts.shape[1]
    max_face = max_face or dim + 1
    best = None
    best_norm = np.inf
    for size in range(1, min(max_face, len(pts)) + 1):
        for idx in combinations(range(len(pts)), size):
            y, w = _affine_projection_of_origin(pts[list(idx)])
            if y is None or np.any(w < -1e-12):
                continue
            nrm = float(np.linalg.norm(y))
            if nrm < best_norm - 1e-15:
                best, best_norm = y, nrm
    return best
