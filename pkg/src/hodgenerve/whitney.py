"""Staggered-grid exterior calculus on the flat 2-torus and Whitney forms.

Layout on an N x N periodic grid with spacing h = L / N:

* 0-forms live on nodes ``(i h, j h)``;
* 1-forms keep their dx part on x-edge midpoints ``((i+1/2) h, j h)`` and
  their dy part on y-edge midpoints ``(i h, (j+1/2) h)``;
* 2-forms live on cell centres ``((i+1/2) h, (j+1/2) h)``.

``d`` is a forward difference, so ``d(d f) = 0`` by telescoping.  Products
average factors onto the target location first.  The Whitney identities
then hold up to roundoff plus contributions from grid cells that straddle
two balls whose centres are too far apart to share a simplex; those shrink
as the grid is refined, so every identity is checked as a convergence study.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .bounds import BoundReport
from .cochains import Cochain, coboundary_matrix
from .geometry import FlatTorus
from .nerve import Nerve
from .net import EpsilonNet

# residuals at or below this are machine-exact; observed order is moot there
EXACT_FLOOR = 1e-12

# staggered offsets (in units of h) of each component location
_OFFSETS = {0: [(0.0, 0.0)], 1: [(0.5, 0.0), (0.0, 0.5)], 2: [(0.5, 0.5)]}


@dataclass(frozen=True)
class GridForm:
    degree: int
    N: int
    lengths: tuple[float, float]
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        expected = 2 if self.degree == 1 else 1
        if self.degree not in (0, 1, 2):
            raise ValueError(f"no {self.degree}-forms on a surface")
        if len(self.components) != expected:
            raise ValueError(f"a {self.degree}-form has {expected} component arrays")
        for c in self.components:
            if c.shape != (self.N, self.N):
                raise ValueError(f"component shape {c.shape}, expected {(self.N, self.N)}")

    @property
    def h(self) -> tuple[float, float]:
        return self.lengths[0] / self.N, self.lengths[1] / self.N

    @property
    def cell_area(self) -> float:
        h1, h2 = self.h
        return h1 * h2

    @classmethod
    def zeros(cls, degree: int, N: int, lengths) -> "GridForm":
        k = 2 if degree == 1 else 1
        return cls(degree, N, tuple(lengths), tuple(np.zeros((N, N)) for _ in range(k)))

    @classmethod
    def constant(cls, degree: int, N: int, lengths, values) -> "GridForm":
        values = np.atleast_1d(values)
        return cls(degree, N, tuple(lengths), tuple(np.full((N, N), float(v)) for v in values))

    @classmethod
    def from_function(cls, degree: int, N: int, lengths, *funcs) -> "GridForm":
        """Sample one callable ``f(x, y)`` per component at its staggered location."""
        h1, h2 = lengths[0] / N, lengths[1] / N
        idx = np.arange(N)
        comps = []
        for (ox, oy), f in zip(_OFFSETS[degree], funcs):
            X, Y = np.meshgrid((idx + ox) * h1, (idx + oy) * h2, indexing="ij")
            comps.append(np.asarray(f(X, Y), dtype=float) * np.ones((N, N)))
        return cls(degree, N, tuple(lengths), tuple(comps))

    def _same_grid(self, other: "GridForm") -> None:
        if self.N != other.N or self.lengths != other.lengths:
            raise ValueError("forms live on different grids")

    def __add__(self, other: "GridForm") -> "GridForm":
        self._same_grid(other)
        if self.degree != other.degree:
            raise ValueError(f"cannot add a {self.degree}-form and a {other.degree}-form")
        return GridForm(self.degree, self.N, self.lengths,
                        tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "GridForm") -> "GridForm":
        return self + (-1.0) * other

    def __rmul__(self, s: float) -> "GridForm":
        return GridForm(self.degree, self.N, self.lengths, tuple(s * c for c in self.components))

    def norm(self) -> float:
        """Quadrature L^2 norm: nodes, edge midpoints or cell centres, each
        weighted by the cell area."""
        return math.sqrt(self.cell_area * sum(float((c * c).sum()) for c in self.components))

    def sup(self) -> float:
        return max(float(np.abs(c).max()) for c in self.components)

    def locations(self, k: int = 0) -> tuple[np.ndarray, np.ndarray]:
        h1, h2 = self.h
        ox, oy = _OFFSETS[self.degree][k]
        idx = np.arange(self.N)
        return np.meshgrid((idx + ox) * h1, (idx + oy) * h2, indexing="ij")

    def dump(self) -> str:
        """Plain-text dump: one header line per component, then the rows."""
        names = {0: ["f"], 1: ["dx", "dy"], 2: ["dxdy"]}[self.degree]
        out = [f"# gridform degree={self.degree} N={self.N} L={self.lengths[0]!r},{self.lengths[1]!r}"]
        for name, c in zip(names, self.components):
            out.append(f"[{name}]")
            out.extend(" ".join(repr(float(x)) for x in row) for row in c)
        return "\n".join(out) + "\n"


def _shift(a, axis):
    return np.roll(a, -1, axis=axis)


def _node_to_xedge(f):
    return 0.5 * (f + _shift(f, 0))


def _node_to_yedge(f):
    return 0.5 * (f + _shift(f, 1))


def _node_to_cell(f):
    g = f + _shift(f, 0)
    return 0.25 * (g + _shift(g, 1))


def _xedge_to_cell(a):
    return 0.5 * (a + _shift(a, 1))


def _yedge_to_cell(a):
    return 0.5 * (a + _shift(a, 0))


def exterior_derivative(f: GridForm) -> GridForm:
    h1, h2 = f.h
    if f.degree == 0:
        (u,) = f.components
        return GridForm(1, f.N, f.lengths, ((_shift(u, 0) - u) / h1, (_shift(u, 1) - u) / h2))
    if f.degree == 1:
        ax, ay = f.components
        w = (_shift(ay, 0) - ay) / h1 - (_shift(ax, 1) - ax) / h2
        return GridForm(2, f.N, f.lengths, (w,))
    raise ValueError("d of a 2-form on a surface")


def wedge(f: GridForm, g: GridForm) -> GridForm:
    f._same_grid(g)
    p, q = f.degree, g.degree
    if p + q > 2:
        raise ValueError(f"wedge of a {p}-form and a {q}-form overflows degree 2")
    if p > q:
        # only the 1 ^ 0 and 2 ^ 0 cases land here; both commute
        return wedge(g, f)
    if p == 0 and q == 0:
        return GridForm(0, f.N, f.lengths, (f.components[0] * g.components[0],))
    if p == 0 and q == 1:
        u = f.components[0]
        gx, gy = g.components
        return GridForm(1, f.N, f.lengths, (_node_to_xedge(u) * gx, _node_to_yedge(u) * gy))
    if p == 0 and q == 2:
        return GridForm(2, f.N, f.lengths, (_node_to_cell(f.components[0]) * g.components[0],))
    ax, ay = (_xedge_to_cell(f.components[0]), _yedge_to_cell(f.components[1]))
    bx, by = (_xedge_to_cell(g.components[0]), _yedge_to_cell(g.components[1]))
    return GridForm(2, f.N, f.lengths, (ax * by - ay * bx,))


@dataclass(frozen=True)
class PartitionOfUnity:
    phi: tuple[GridForm, ...]
    centers: np.ndarray
    epsilon: float
    N: int
    lengths: tuple[float, float]
    dphi_forms: tuple[GridForm, ...]
    dphi_sup: tuple[float, ...]
    profile: str = "exp(1 - 1/(1 - t^2)), t = d(x, p_j) / epsilon"

    def dphi(self, j: int) -> GridForm:
        return self.dphi_forms[j]


def bump(t):
    """exp(1 - 1/(1 - t^2)) on t < 1, zero beyond; equals 1 at t = 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = t < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def _grid_distances(space: FlatTorus, X, Y, center) -> np.ndarray:
    L1, L2 = space.lengths
    dx = np.abs(X - center[0]) % L1
    dy = np.abs(Y - center[1]) % L2
    dx = np.minimum(dx, L1 - dx)
    dy = np.minimum(dy, L2 - dy)
    return np.hypot(dx, dy)


def build_partition(space: FlatTorus, net: EpsilonNet, N: int) -> PartitionOfUnity:
    if not isinstance(space, FlatTorus) or space.dim != 2:
        raise ValueError("partitions of unity are built on the flat 2-torus only")
    eps = net.epsilon
    h = max(space.lengths) / N
    if h > eps / 8:
        raise ValueError(f"grid spacing {h:.6g} exceeds epsilon/8 = {eps / 8:.6g}")
    probe = GridForm.zeros(0, N, space.lengths)
    X, Y = probe.locations()
    centers = net.coords
    raw = [bump(_grid_distances(space, X, Y, c) / eps) for c in centers]
    total = reduce(np.add, raw)
    if np.any(total <= 0):
        i, j = np.argwhere(total <= 0)[0]
        raise ValueError(f"node ({X[i, j]:.6g}, {Y[i, j]:.6g}) is covered by no ball")
    phi = tuple(GridForm(0, N, space.lengths, (b / total,)) for b in raw)
    dphi = tuple(exterior_derivative(f) for f in phi)
    return PartitionOfUnity(phi, centers, eps, N, space.lengths, dphi, tuple(d.sup() for d in dphi))


def _dphi_wedge(pou: PartitionOfUnity, idx) -> GridForm:
    return reduce(wedge, (pou.dphi(i) for i in idx))


def ordered_whitney_form(pou: PartitionOfUnity, I) -> GridForm:
    """sum_j (-1)^j phi_{i_j} dphi_{i_0} ^ .. (omit i_j) .. ^ dphi_{i_q}
    for an arbitrary ordered tuple I."""
    I = tuple(I)
    q = len(I) - 1
    if q > 2:
        raise ValueError("Whitney forms above degree 2 do not fit on the grid")
    if q == 0:
        return pou.phi[I[0]]
    terms = []
    for j, i in enumerate(I):
        rest = I[:j] + I[j + 1:]
        t = wedge(pou.phi[i], _dphi_wedge(pou, rest))
        terms.append(t if j % 2 == 0 else (-1.0) * t)
    return reduce(lambda a, b: a + b, terms)


def whitney_form(nerve: Nerve, I, pou: PartitionOfUnity) -> GridForm:
    I = tuple(I)
    q = len(I) - 1
    if I not in nerve.index(q):
        raise KeyError(f"{I} is not a simplex of the nerve")
    return ordered_whitney_form(pou, I)


def dphi_product(pou: PartitionOfUnity, I) -> GridForm:
    """dphi_{i_0} ^ ... ^ dphi_{i_q}."""
    return _dphi_wedge(pou, tuple(I))


def whitney_map(nerve: Nerve, c: Cochain, pou: PartitionOfUnity) -> GridForm:
    q = c.degree
    if q > 2:
        raise ValueError("Whitney map above degree 2 does not fit on the grid")
    c.check(nerve)
    out = GridForm.zeros(q, pou.N, pou.lengths)
    for I, v in zip(nerve.S(q), c.values):
        if v:
            out = out + float(v) * ordered_whitney_form(pou, I)
    return out


def support_margin(pou: PartitionOfUnity) -> float:
    """Distance beyond which every stencil node of a location is also outside."""
    h1, h2 = pou.lengths[0] / pou.N, pou.lengths[1] / pou.N
    return 0.5 * math.hypot(h1, h2) * (1 + 1e-9)


def support_leak(W: GridForm, pou: PartitionOfUnity, I) -> float:
    """max |W| over locations farther than epsilon + margin from some p_i, i in I."""
    space = FlatTorus(pou.lengths)
    reach = pou.epsilon + support_margin(pou)
    leak = 0.0
    for k, comp in enumerate(W.components):
        X, Y = W.locations(k)
        outside = np.zeros(comp.shape, dtype=bool)
        for i in I:
            outside |= _grid_distances(space, X, Y, pou.centers[i]) >= reach
        if outside.any():
            leak = max(leak, float(np.abs(comp[outside]).max()))
    return leak


def _derivative_pair(nerve: Nerve, pou: PartitionOfUnity, q: int) -> tuple[float, float]:
    if q not in (0, 1):
        raise ValueError("dW_I needs q + 1 <= 2")
    res = ref = 0.0
    for I in nerve.S(q):
        target = (q + 1.0) * dphi_product(pou, I)
        res += (exterior_derivative(ordered_whitney_form(pou, I)) - target).norm() ** 2
        ref += target.norm() ** 2
    return math.sqrt(res), math.sqrt(ref)


def derivative_residual(nerve: Nerve, pou: PartitionOfUnity, q: int) -> float:
    """sqrt(sum_I ||dW_I - (q+1) dphi_I||^2) over I in S_q, q in {0, 1}."""
    return _derivative_pair(nerve, pou, q)[0]


def coface_sign(j: int, I) -> int:
    """Sign of the permutation sorting (j, i_0, ..., i_q)."""
    return -1 if sum(1 for i in I if i < j) % 2 else 1


def _coface_sum(nerve: Nerve, I, pou: PartitionOfUnity) -> tuple[GridForm, GridForm, int]:
    I = tuple(I)
    q = len(I) - 1
    if q > 1:
        raise ValueError("the coface sum needs |I| <= 2")
    nxt = nerve.index(q + 1)
    lhs = GridForm.zeros(q + 1, pou.N, pou.lengths)
    used = 0
    for j in range(len(pou.phi)):
        if j in I:
            continue
        J = tuple(sorted(I + (j,)))
        if J not in nxt:
            continue
        lhs = lhs + float(coface_sign(j, I)) * ordered_whitney_form(pou, J)
        used += 1
    return lhs, dphi_product(pou, I), used


def coface_sum_residual(nerve: Nerve, I, pou: PartitionOfUnity) -> tuple[float, bool]:
    """||sum_j W_{(j, I)} - dphi_I|| over j with {j} u I in the nerve.

    Returns (residual, vacuous); vacuous means no j extends I, so the sum is
    empty and the residual is just ||dphi_I||.
    """
    lhs, rhs, used = _coface_sum(nerve, I, pou)
    return (lhs - rhs).norm(), used == 0


def _coface_pair(nerve: Nerve, pou: PartitionOfUnity, q: int) -> tuple[float, float]:
    res = ref = 0.0
    for I in nerve.S(q):
        lhs, rhs, used = _coface_sum(nerve, I, pou)
        if used:
            res += (lhs - rhs).norm() ** 2
            ref += rhs.norm() ** 2
    return math.sqrt(res), math.sqrt(ref)


def coface_sum_total(nerve: Nerve, pou: PartitionOfUnity, q: int) -> float:
    """Root-sum-square of the coface-sum residual over the non-vacuous I in S_q."""
    return _coface_pair(nerve, pou, q)[0]


def _chain_map_pair(nerve: Nerve, c: Cochain, pou: PartitionOfUnity) -> tuple[float, float]:
    q = c.degree
    if q > 1:
        raise ValueError("the chain-map check needs q + 1 <= 2")
    dc = Cochain(q + 1, coboundary_matrix(nerve, q).matrix @ c.values)
    lhs = exterior_derivative(whitney_map(nerve, c, pou))
    rhs = (q + 1.0) * whitney_map(nerve, dc, pou)
    return (lhs - rhs).norm(), max(lhs.norm(), rhs.norm())


def chain_map_residual(nerve: Nerve, c: Cochain, pou: PartitionOfUnity) -> float:
    """||d W(c) - (q+1) W(delta c)|| for a scalar q-cochain, q + 1 <= 2."""
    return _chain_map_pair(nerve, c, pou)[0]


def observed_order(coarse: float, fine: float, ratio: float = 2.0, scale: float = 1.0) -> float:
    """log_ratio(coarse / fine); inf when both residuals are at roundoff
    level (below EXACT_FLOOR times ``scale``)."""
    floor = EXACT_FLOOR * max(scale, 1e-300)
    if coarse <= floor and fine <= floor:
        return math.inf
    if fine <= 0:
        return math.inf
    return math.log(coarse / fine) / math.log(ratio)


@dataclass(frozen=True)
class StudyRow:
    check: str
    N: int
    residual: float
    scale: float
    observed_order: float


def residual_study(space: FlatTorus, net: EpsilonNet, nerve: Nerve, grids=(64, 128),
                   seed: int = 0) -> list[StudyRow]:
    """Run every identity check on each grid size; orders compare each grid
    with the previous one."""
    rng = np.random.default_rng(seed)
    cochains = {q: Cochain(q, rng.standard_normal(nerve.size(q))) for q in (0, 1)}
    checks = {
        "derivative_q0": lambda pou: _derivative_pair(nerve, pou, 0),
        "derivative_q1": lambda pou: _derivative_pair(nerve, pou, 1),
        "coface_sum_q0": lambda pou: _coface_pair(nerve, pou, 0),
        "coface_sum_q1": lambda pou: _coface_pair(nerve, pou, 1),
        "chain_map_q0": lambda pou: _chain_map_pair(nerve, cochains[0], pou),
        "chain_map_q1": lambda pou: _chain_map_pair(nerve, cochains[1], pou),
    }
    values = {name: [] for name in checks}
    for N in grids:
        pou = build_partition(space, net, N)
        for name, fn in checks.items():
            values[name].append(fn(pou))
    rows = []
    for name, vals in values.items():
        for k, (N, (res, scale)) in enumerate(zip(grids, vals)):
            if k == 0:
                order = math.nan
            else:
                (prev, prev_scale), ratio = vals[k - 1], N / grids[k - 1]
                order = observed_order(prev, res, ratio, max(scale, prev_scale))
            rows.append(StudyRow(name, N, res, scale, order))
    return rows


def _basis_matrix(nerve: Nerve, pou: PartitionOfUnity, q: int) -> tuple[np.ndarray, list[GridForm]]:
    forms = [ordered_whitney_form(pou, I) for I in nerve.S(q)]
    if not forms:
        return np.zeros((0, 0)), forms
    M = np.array([np.concatenate([c.ravel() for c in W.components]) for W in forms])
    return M, forms


def whitney_norm_audit(nerve: Nerve, pou: PartitionOfUnity, q: int, trials: int, rng) -> BoundReport:
    """Empirical max of ||W(c)||^2 over random unit q-cochains against the
    Cauchy-Schwarz constant N_loc * max_I ||W_I||_inf^2 vol(supp W_I).

    N_loc is the largest number of W_I nonzero at one grid location; the
    support volume counts every component location where W_I is nonzero.
    """
    M, forms = _basis_matrix(nerve, pou, q)
    area = (pou.lengths[0] / pou.N) * (pou.lengths[1] / pou.N)
    inst = {"q": q, "trials": trials, "n_simplices": len(forms), "N": pou.N}
    if not forms:
        return BoundReport("whitney_norm", 0.0, -math.inf, True, inst, {"vacuous": True})
    nz = M != 0
    n_loc = int(nz.sum(axis=0).max())
    per_I = [float(np.abs(row).max()) ** 2 * area * int(mask.sum()) for row, mask in zip(M, nz)]
    k_bound = n_loc * max(per_I)
    k_emp = 0.0
    for _ in range(trials):
        c = rng.standard_normal(len(forms))
        c /= np.linalg.norm(c)
        w = c @ M
        k_emp = max(k_emp, area * float(w @ w))
    sharp = n_loc * max(area * float(row @ row) for row in M)
    return BoundReport("whitney_norm", k_emp, math.log(k_bound), k_emp <= k_bound * (1 + 1e-12), inst,
                       {"k_emp": k_emp, "k_bound": k_bound, "k_sharp": sharp, "n_loc": n_loc,
                        "dphi_sup_max": max(pou.dphi_sup)})
