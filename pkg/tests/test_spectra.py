import math

import numpy as np
import pytest

from hodgenerve.geometry import RoundSphere
from hodgenerve.nerve import Nerve, build_nerve
from hodgenerve.net import build_epsilon_net
from hodgenerve.spectra import (betti, laplacian_spectrum, positive_part, spectral_pairing_error,
                                torus_hodge_spectrum, zero_count)


def brute(nerve, q):
    """Independent dense Laplacian from the definition of delta."""
    def delta(k):
        rows, cols = nerve.S(k + 1), {s: i for i, s in enumerate(nerve.S(k))}
        D = np.zeros((len(rows), len(cols)))
        for r, I in enumerate(rows):
            for j in range(len(I)):
                D[r, cols[I[:j] + I[j + 1:]]] = (-1) ** j
        return D
    up = delta(q)
    L = up.T @ up
    if q > 0:
        dn = delta(q - 1)
        L = L + dn @ dn.T
    return np.linalg.eigvalsh(L)


@pytest.mark.parametrize("which,q,expected", [
    ("triangle", 0, [0, 3, 3]),
    ("three_cycle", 1, [0, 3, 3]),
    ("triangle", 1, [3, 3, 3]),
])
def test_small_complex_spectra(which, q, expected, request):
    nv = request.getfixturevalue(which)
    rep = laplacian_spectrum(nv, q)
    assert np.allclose(rep.eigenvalues, expected, atol=1e-8)
    assert np.allclose(rep.eigenvalues, brute(nv, q), atol=1e-8)


def test_three_cycle_coexact_q0(three_cycle):
    rep = laplacian_spectrum(three_cycle, 0)
    assert np.allclose(rep.coexact, [3, 3], atol=1e-10)


def test_betti_small(triangle, three_cycle):
    assert [betti(triangle, q) for q in range(3)] == [1, 0, 0]
    assert [betti(three_cycle, q) for q in range(2)] == [1, 1]
    two = Nerve.from_simplices([], n_vertices=2)
    assert betti(two, 0) == 2


def test_eigenvalue_count_and_rank_nullity(torus_net_02):
    T, net = torus_net_02
    nv = build_nerve(T, net, 3)
    for q in range(3):
        rep = laplacian_spectrum(nv, q)
        assert len(rep.eigenvalues) == nv.size(q)
        assert np.all(np.diff(rep.eigenvalues) >= 0)
        assert rep.betti + len(rep.positive) == nv.size(q)
        assert spectral_pairing_error(rep) <= 1e-8


def test_sphere_betti():
    S = RoundSphere(1.0)
    nv = build_nerve(S, build_epsilon_net(S, 0.4, 100), 3)
    assert [betti(nv, q) for q in range(3)] == [1, 0, 1]


def test_zero_threshold_is_relative():
    assert zero_count([1e-9, 1.0, 2.0]) == 1
    assert zero_count([1e-9, 1e-3]) == 0
    assert zero_count(np.zeros(3)) == 3
    assert positive_part([0.0, 2.0, 1.0]).tolist() == [1.0, 2.0]


def _fourier_oracle(L1, L2, p, count):
    """Independent enumeration: all (m, n) in a large box, then trim."""
    vals = []
    for m in range(-30, 31):
        for n in range(-30, 31):
            if m or n:
                vals += [4 * math.pi ** 2 * (m * m / L1 ** 2 + n * n / L2 ** 2)] * (2 if p == 1 else 1)
    return sorted(vals)[:count]


def test_torus_spectrum_multiplicities():
    s0 = torus_hodge_spectrum(1, 1, 0, 12)
    assert s0.distinct()[0] == (pytest.approx(4 * math.pi ** 2), 4)
    assert s0.zero_multiplicity == 1
    s1 = torus_hodge_spectrum(1, 1, 1, 12)
    assert s1.distinct()[0] == (pytest.approx(4 * math.pi ** 2), 8)
    assert s1.zero_multiplicity == 2
    assert torus_hodge_spectrum(1, 1, 2, 3).zero_multiplicity == 1


@pytest.mark.parametrize("L1,L2,p", [(1, 1, 0), (1, 1, 1), (1.0, 1.7, 1), (2.0, 0.5, 2)])
def test_torus_spectrum_matches_independent_enumeration(L1, L2, p):
    got = torus_hodge_spectrum(L1, L2, p, 60).positive
    assert np.allclose(got, _fourier_oracle(L1, L2, p, 60), rtol=1e-12)


def test_torus_spectrum_rejects_bad_degree():
    with pytest.raises(ValueError):
        torus_hodge_spectrum(1, 1, 3, 5)
