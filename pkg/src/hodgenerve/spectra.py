"""Laplacian spectra, Betti numbers and the flat 2-torus Hodge spectrum."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cochains import gram_up, laplacian_matrix
from .linalg import residual_max, symmetric_eigen
from .nerve import Nerve

ZERO_TAU = 1e-8


class BettiMismatch(RuntimeError):
    pass


def zero_count(eigenvalues, tau: float = ZERO_TAU) -> int:
    """Eigenvalues below tau * lambda_max (lambda_max = 1 for the zero matrix)."""
    w = np.asarray(eigenvalues, dtype=float)
    if w.size == 0:
        return 0
    lmax = float(w.max())
    if lmax <= 0:
        lmax = 1.0
    return int(np.sum(w < tau * lmax))


def positive_part(eigenvalues, tau: float = ZERO_TAU) -> np.ndarray:
    w = np.sort(np.asarray(eigenvalues, dtype=float))
    return w[zero_count(w, tau):]


@dataclass(frozen=True)
class SpectrumReport:
    q: int
    eigenvalues: np.ndarray
    betti: int
    tau: float
    coexact: np.ndarray
    residual_max: float
    down_nonzero: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def positive(self) -> np.ndarray:
        return self.eigenvalues[self.betti:]

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "betti": self.betti,
            "tau": self.tau,
            "coexact": [float(x) for x in self.coexact],
            "residual_max": self.residual_max,
        }


def laplacian_spectrum(nerve: Nerve, q: int, tau: float = ZERO_TAU,
                       method: str = "auto") -> SpectrumReport:
    L = laplacian_matrix(nerve, q)
    w, V = symmetric_eigen(L.matrix, method=method)
    res = residual_max(L.matrix, w, V)
    # coexact part read off delta_q^T delta_q directly, not by projecting
    w_up, _ = symmetric_eigen(L.up, method=method)
    w_down = symmetric_eigen(L.down, method=method)[0] if q > 0 else np.zeros(0)
    return SpectrumReport(q, w, zero_count(w, tau), tau, positive_part(w_up, tau), res,
                          positive_part(w_down, tau))


def _rank(G: np.ndarray, tau: float, method: str) -> int:
    if G.size == 0:
        return 0
    w = symmetric_eigen(G, method=method)[0]
    return len(w) - zero_count(w, tau)


def betti(nerve: Nerve, q: int, tau: float = ZERO_TAU, method: str = "auto",
          spectrum: SpectrumReport | None = None) -> int:
    """Zero multiplicity of the Laplacian, confirmed by rank-nullity."""
    if spectrum is None:
        spectrum = laplacian_spectrum(nerve, q, tau, method)
    rank_q = _rank(gram_up(nerve, q), tau, method)
    rank_qm1 = _rank(gram_up(nerve, q - 1), tau, method) if q > 0 else 0
    by_rank = nerve.size(q) - rank_q - rank_qm1
    if by_rank != spectrum.betti:
        raise BettiMismatch(f"b_{q}: Laplacian kernel {spectrum.betti} vs rank-nullity {by_rank}")
    return spectrum.betti


def spectral_pairing_error(report: SpectrumReport) -> float:
    """Relative mismatch between the nonzero Laplacian spectrum and the union
    of the up and down Gram spectra; inf when the counts differ."""
    union = np.sort(np.concatenate([report.coexact, report.down_nonzero]))
    lap = report.positive
    if len(union) != len(lap):
        return math.inf
    if not len(lap):
        return 0.0
    return float(np.abs(union - lap).max() / lap.max())


@dataclass(frozen=True)
class AnalyticSpectrum:
    p: int
    positive: np.ndarray
    zero_multiplicity: int

    def distinct(self) -> list[tuple[float, int]]:
        out: list[tuple[float, int]] = []
        for x in self.positive:
            if out and math.isclose(out[-1][0], x, rel_tol=1e-12):
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((float(x), 1))
        return out


def torus_hodge_spectrum(L1: float, L2: float, p: int, count: int) -> AnalyticSpectrum:
    """First ``count`` positive Hodge eigenvalues on R^2 / (L1 Z x L2 Z).

    Functions: 4 pi^2 (m^2/L1^2 + n^2/L2^2).  One-forms carry each function
    eigenvalue twice; two-forms match functions by Hodge duality.
    """
    if p not in (0, 1, 2):
        raise ValueError(f"the flat 2-torus has no {p}-forms")
    if count < 1:
        raise ValueError("count must be at least 1")
    mult = 2 if p == 1 else 1
    M = 2
    while True:
        m = np.arange(-M, M + 1)
        vals = 4 * math.pi ** 2 * ((m[:, None] / L1) ** 2 + (m[None, :] / L2) ** 2)
        vals = np.sort(np.repeat(vals.ravel(), mult))[mult:]
        # the box must hold the full disc up to the last value returned
        if len(vals) >= count and vals[count - 1] < 4 * math.pi ** 2 * (M + 1) ** 2 / max(L1, L2) ** 2:
            return AnalyticSpectrum(p, vals[:count], 2 if p == 1 else 1)
        M *= 2
