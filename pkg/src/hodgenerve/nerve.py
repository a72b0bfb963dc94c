"""Nerve of the epsilon-ball cover of a net."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .geometry import (ChartError, FlatTorus, ModelSpace, intersection_test_method,
                       minimax_center_radius)
from .minball import min_enclosing_ball
from .net import EpsilonNet


@dataclass(frozen=True)
class NerveStats:
    nu: int
    counts: tuple[int, ...]
    cardinality_bounds: tuple[float, ...]
    cardinality_ok: tuple[bool, ...]
    n_vertices: int

    def as_dict(self) -> dict:
        return {
            "nu": self.nu,
            "counts": list(self.counts),
            "cardinality_bounds": list(self.cardinality_bounds),
            "cardinality_ok": list(self.cardinality_ok),
        }


@dataclass(frozen=True)
class Nerve:
    """Simplex lists S_0..S_qmax, each sorted lexicographically.

    ``closed`` is True when every degree above ``qmax`` is known to be empty
    (the complex was enumerated to exhaustion), so coboundaries out of the
    top degree are zero maps rather than unknown.
    """

    simplices: tuple[tuple[tuple[int, ...], ...], ...]
    witness_radii: tuple[tuple[float, ...], ...]
    epsilon: float | None = None
    centers: tuple = ()
    closed: bool = False
    test_method: str = "exact"
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def qmax(self) -> int:
        return len(self.simplices) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.simplices[0])

    def S(self, q: int) -> tuple[tuple[int, ...], ...]:
        if q < 0:
            raise ValueError(f"negative degree {q}")
        if q <= self.qmax:
            return self.simplices[q]
        if self.closed:
            return ()
        raise ValueError(f"degree {q} beyond qmax={self.qmax} of this nerve")

    def has(self, q: int) -> bool:
        return q <= self.qmax or self.closed

    def index(self, q: int) -> dict:
        if q not in self._index:
            self._index[q] = {s: k for k, s in enumerate(self.S(q))}
        return self._index[q]

    def size(self, q: int) -> int:
        return len(self.S(q))

    @classmethod
    def from_simplices(cls, maximal, n_vertices: int | None = None) -> "Nerve":
        """Downward closure of an abstract complex, enumerated to exhaustion."""
        faces: set[tuple[int, ...]] = set()
        for s in maximal:
            s = tuple(sorted(s))
            if len(set(s)) != len(s):
                raise ValueError(f"repeated vertex in {s}")
            for k in range(1, len(s) + 1):
                faces.update(combinations(s, k))
        if n_vertices is not None:
            faces.update((i,) for i in range(n_vertices))
        top = max((len(f) for f in faces), default=1) - 1
        levels = tuple(tuple(sorted(f for f in faces if len(f) == q + 1)) for q in range(top + 1))
        radii = tuple(tuple(0.0 for _ in lvl) for lvl in levels)
        return cls(levels, radii, closed=True, test_method="abstract")


def _pair_table(space: ModelSpace, net: EpsilonNet) -> np.ndarray:
    C = net.coords
    if not len(C):
        return np.zeros((0, 0))
    return np.array([space.distances_from(c, C) for c in net.centers])


def _radius(space: ModelSpace, pts, epsilon: float) -> float:
    """Minimax radius, short-circuited when it certainly exceeds epsilon."""
    if isinstance(space, FlatTorus):
        base = pts[0].array
        lifted = np.array([space.wrapped_difference(base, p.coords) for p in pts])
        r = min_enclosing_ball(lifted)[1]
        if r >= min(space.lengths) / 4:
            # past the convexity radius; under the guard this exceeds epsilon
            return max(r, epsilon)
        return r
    return minimax_center_radius(space, pts)


def build_nerve(space: ModelSpace, net: EpsilonNet, qmax: int,
                guard_radius: float | None = None) -> Nerve:
    """Enumerate S_0..S_qmax of the open cover {B(p_i, eps)}.

    Tuples are grown from surviving faces: a candidate (q+1)-tuple must be a
    clique of the 1-skeleton with every q-face already present, then its
    minimax radius must be strictly below epsilon.
    """
    if qmax < 0:
        raise ValueError(f"qmax must be nonnegative, got {qmax}")
    eps = net.epsilon
    n = len(net.centers)
    if n > 1:
        guard = space.guard_radius() if guard_radius is None else guard_radius
        if not 3 * eps < guard:
            raise ChartError(f"3*epsilon = {3 * eps:.6g} must be below the guard radius {guard:.6g}")
    closed = False
    if qmax > n - 1:
        warnings.warn(f"qmax={qmax} exceeds |X|-1={n - 1}; clamped", stacklevel=2)
        qmax = n - 1
        closed = True
    if n > 1 and qmax == 0:
        # nu needs pairwise intersections, so S_1 is always enumerated
        qmax = 1
    centers = net.centers
    levels = [tuple((i,) for i in range(n))]
    radii = [tuple(0.0 for _ in range(n))]
    if qmax >= 1:
        D = _pair_table(space, net)
        nbrs: list[set[int]] = [set() for _ in range(n)]
        edges, erad = [], []
        for i in range(n):
            # slack so the pair rule, not the rounding, decides near 2 eps
            for j in np.flatnonzero(D[i, i + 1:] < 2 * eps * (1 + 1e-9)) + i + 1:
                j = int(j)
                r = _radius(space, [centers[i], centers[j]], eps)
                if r < eps:
                    edges.append((i, j))
                    erad.append(r)
                    nbrs[i].add(j)
                    nbrs[j].add(i)
        levels.append(tuple(edges))
        radii.append(tuple(erad))
        if not edges:
            closed = True
        for q in range(2, qmax + 1):
            if closed:
                break
            prev = set(levels[q - 1])
            new, nrad = [], []
            for I in levels[q - 1]:
                common = set.intersection(*(nbrs[i] for i in I))
                for j in sorted(k for k in common if k > I[-1]):
                    J = I + (j,)
                    if any(J[:k] + J[k + 1:] not in prev for k in range(len(J) - 1)):
                        continue
                    r = _radius(space, [centers[i] for i in J], eps)
                    if r < eps:
                        new.append(J)
                        nrad.append(r)
            levels.append(tuple(new))
            radii.append(tuple(nrad))
            if not new:
                closed = True
                break
    return Nerve(tuple(levels), tuple(radii), epsilon=eps, centers=tuple(centers),
                 closed=closed, test_method=intersection_test_method(space))


def coface_counts(nerve: Nerve, q: int) -> np.ndarray:
    """For each I in S_q, the number of j with U_j meeting U_I (j in I included)."""
    counts = np.full(nerve.size(q), q + 1, dtype=int)
    idx = nerve.index(q)
    for J in nerve.S(q + 1):
        for k in range(len(J)):
            counts[idx[J[:k] + J[k + 1:]]] += 1
    return counts


def nerve_stats(nerve: Nerve) -> NerveStats:
    """nu and the simplex-count bounds |S_q| <= nu^q / (q+1)! * |X|.

    The coface count only shrinks when I grows, so degrees whose cofaces are
    unknown (the top one of an open nerve) cannot raise the maximum.
    """
    nu = 0
    top = nerve.qmax if nerve.closed else nerve.qmax - 1
    for q in range(max(top, 0) + 1):
        if not nerve.has(q + 1):
            break
        c = coface_counts(nerve, q)
        if c.size:
            nu = max(nu, int(c.max()))
    if nu == 0 and nerve.n_vertices:
        nu = 1
    counts = tuple(nerve.size(q) for q in range(nerve.qmax + 1))
    X = nerve.n_vertices
    bounds = tuple(nu ** q / math.factorial(q + 1) * X for q in range(len(counts)))
    ok = tuple(c <= b * (1 + 1e-12) for c, b in zip(counts, bounds))
    return NerveStats(nu, counts, bounds, ok, X)
