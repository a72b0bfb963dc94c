"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

import conftest
from hodgenerve.bounds import (delta_norm_audit, gram_minor_audit, lower_bound_audit,
                               random_sign_matrix, rayleigh_audit, treves_counterexample,
                               treves_norm_audit, treves_operator, verify_treves)
from hodgenerve.cochains import delta_squared
from hodgenerve.config import parse_config
from hodgenerve.geometry import FlatTorus, RoundSphere
from hodgenerve.nerve import Nerve, build_nerve, nerve_stats
from hodgenerve.net import build_epsilon_net
from hodgenerve.pipeline import compare_torus
from hodgenerve.spectra import betti, laplacian_spectrum, spectral_pairing_error
from hodgenerve.whitney import build_partition, residual_study, whitney_norm_audit

# pinned tolerances
SPECTRUM_ABS_TOL = 1e-8
PAIRING_REL_TOL = 1e-8
ORDER_MIN = 0.9
PARTITION_TOL = 1e-12
SUPPORT_TOL = 1e-10
BAND_SPREAD_MAX = 50.0


def record(n: int, name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {name}: {detail}"
    conftest.ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def random_configuration(rng):
    """A torus or sphere with epsilon inside the guard and a fine enough grid."""
    if rng.random() < 0.5:
        L = tuple(float(x) for x in rng.uniform(0.8, 1.5, 2))
        space = FlatTorus(L)
        eps = float(rng.uniform(0.14, 0.24)) * min(L)
    else:
        R = float(rng.uniform(0.8, 1.5))
        space = RoundSphere(R)
        eps = float(rng.uniform(0.35, 0.6)) * R
    res = 16
    while not space.sample_spacing(res) < eps / 4:
        res += 8
    return space, eps, res


def generated_nerves(count, seed, qmax):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        space, eps, res = random_configuration(rng)
        out.append(build_nerve(space, build_epsilon_net(space, eps, res), qmax))
    return out


@pytest.fixture(scope="module")
def nerves50():
    return generated_nerves(50, 2024, 3)


def test_criterion_01_exact_complex_identity():
    t0 = time.perf_counter()
    nerves = generated_nerves(20, 1, 4)
    worst, checked = 0, 0
    for nv in nerves:
        for q in range(3):
            D = delta_squared(nv, q)
            assert D.dtype.kind == "i"
            worst = max(worst, int(abs(D).max()) if D.nnz else 0)
            checked += 1
    dt = time.perf_counter() - t0
    n_torus = sum(isinstance(nv.centers[0].coords, tuple) and len(nv.centers[0].coords) == 2 for nv in nerves)
    record(1, "delta_{q+1} delta_q = 0 (integers)", worst == 0 and dt < 10,
           f"{checked} products over 20 nerves ({n_torus} torus, {20 - n_torus} sphere), "
           f"max |entry| = {worst}, {dt:.1f} s (< 10 s)")


def test_criterion_02_small_complex_spectra():
    tri = Nerve.from_simplices([(0, 1, 2)])
    cyc = Nerve.from_simplices([(0, 1), (0, 2), (1, 2)])
    cases = [("K3 q=0", tri, 0, [0, 3, 3]), ("3-cycle q=1", cyc, 1, [0, 3, 3]),
             ("2-simplex q=1", tri, 1, [3, 3, 3])]
    errs = {name: float(np.abs(laplacian_spectrum(nv, q).eigenvalues - np.array(exp)).max())
            for name, nv, q, exp in cases}
    record(2, "small-complex spectra", all(e <= SPECTRUM_ABS_TOL for e in errs.values()),
           ", ".join(f"{k} err {v:.1e}" for k, v in errs.items()) + f" (tol {SPECTRUM_ABS_TOL})")


def test_criterion_03_spectral_pairing(nerves50):
    worst, n = 0.0, 0
    for nv in nerves50:
        for q in range(3):
            worst = max(worst, spectral_pairing_error(laplacian_spectrum(nv, q)))
            n += 1
    record(3, "nonzero spectrum = up + down Gram spectra", worst <= PAIRING_REL_TOL,
           f"{n} spectra, max relative mismatch {worst:.2e} (tol {PAIRING_REL_TOL})")


def test_criterion_04_betti_reproduction():
    t0 = time.perf_counter()
    T = FlatTorus((1.0, 1.0))
    rows = {}
    for eps in (0.12, 0.15, 0.2):
        nv = build_nerve(T, build_epsilon_net(T, eps, 200), 3)
        rows[eps] = tuple(betti(nv, q) for q in range(3))
    dt = time.perf_counter() - t0
    ok = all(r == (1, 2, 1) for r in rows.values()) and dt < 120
    record(4, "torus Betti numbers (1, 2, 1)", ok,
           ", ".join(f"eps={e}: {r}" for e, r in rows.items()) + f", {dt:.1f} s (< 120 s)")


def test_criterion_05_delta_norm_bound(nerves50):
    rng = np.random.default_rng(5)
    fails, n = 0, 0
    worst_ratio = 0.0
    for nv in nerves50:
        nu = nerve_stats(nv).nu
        for q in range(3):
            a = delta_norm_audit(nv, q, nu)
            b = rayleigh_audit(nv, q, 100, rng, nu)
            fails += (not a.passed) + (not b.passed)
            worst_ratio = max(worst_ratio, a.lhs / a.rhs)
            n += 1
    record(5, "lambda_max(delta^T delta) <= (q+2) nu", fails == 0,
           f"{len(nerves50)} nerves, {n} degrees, 100 Rayleigh trials each, {fails} failures, "
           f"max lhs/rhs {worst_ratio:.3f}")


def test_criterion_06_coexact_lower_bound(nerves50):
    fails, n, min_gap = 0, 0, math.inf
    for nv in nerves50:
        nu = nerve_stats(nv).nu
        for p in range(3):
            if nv.size(p + 1) == 0:
                continue
            r = lower_bound_audit(nv, p, nu=nu)
            fails += not r.passed
            n += 1
            min_gap = min(min_gap, r.details.get("log_gap", math.inf))
    record(6, "first coexact eigenvalue lower bound (log space)", fails == 0 and n > 0,
           f"{n} audits with nonempty S_(p+1), {fails} failures, min log-gap {min_gap:.1f}")


def test_criterion_07_treves_operator():
    rng = np.random.default_rng(7)
    fails, minor_runs = 0, 0
    for _ in range(100):
        n, m = int(rng.integers(1, 17)), int(rng.integers(1, 17))
        k = int(rng.integers(1, 5))
        inst = treves_operator(random_sign_matrix(rng, n, m, k, float(rng.uniform(0.2, 0.8))), k)
        verify_treves(inst)  # ABA = A and B = 0 on Im(A)^perp, exact rationals
        fails += not treves_norm_audit(inst).passed
        if inst.r <= 10:
            fails += not gram_minor_audit(inst, 3).passed
            minor_runs += 1
    record(7, "ABA = A, ||B||^2 <= n k^(2n), Gram minors <= k^(2l-1)", fails == 0,
           f"100 matrices (n, m <= 16, k <= 4), {minor_runs} exhaustive minor audits, {fails} failures")


def test_criterion_08_counterexample_ratio():
    got = {m: treves_counterexample(m) for m in (2, 4, 10, 50)}
    ok = all(c["exact_match"] for c in got.values())
    four = got[4]
    ok &= four["ratio"] == Fraction(14, 3)
    ok &= four["norm_Av_sq"] == 3
    record(8, "||BAv||^2 / ||Av||^2 = m(2m-1)/6", ok,
           ", ".join(f"m={m}: {c['ratio']}" for m, c in got.items()) + f", ||Av||^2 (m=4) = {four['norm_Av_sq']}")


def test_criterion_09_whitney_identities():
    t0 = time.perf_counter()
    T = FlatTorus((1.0, 1.0))
    net = build_epsilon_net(T, 0.2, 200)
    nv = build_nerve(T, net, 3)
    rows = residual_study(T, net, nv, (64, 128), seed=0)
    orders = {r.check: r.observed_order for r in rows if r.N == 128}
    partition = 0.0
    from hodgenerve.whitney import ordered_whitney_form, support_leak
    leak = 0.0
    for N in (64, 128):
        pou = build_partition(T, net, N)
        partition = max(partition, float(np.abs(sum(f.components[0] for f in pou.phi) - 1).max()))
        for q in range(3):
            for I in nv.S(q):
                leak = max(leak, support_leak(ordered_whitney_form(pou, I), pou, I))
    dt = time.perf_counter() - t0
    ok = all(o >= ORDER_MIN for o in orders.values()) and partition <= PARTITION_TOL \
        and leak <= SUPPORT_TOL and dt < 180
    detail = ", ".join(f"{k} {v:.2f}" if math.isfinite(v) else f"{k} exact" for k, v in orders.items())
    record(9, "Whitney identities converge", ok,
           f"orders 64->128: {detail}; |sum phi - 1| {partition:.1e}; leak {leak:.1e}; {dt:.1f} s (< 180 s)")


def test_criterion_10_whitney_norm_bound():
    T = FlatTorus((1.0, 1.0))
    net = build_epsilon_net(T, 0.2, 200)
    nv = build_nerve(T, net, 2)
    pou = build_partition(T, net, 64)
    rng = np.random.default_rng(10)
    reps = [whitney_norm_audit(nv, pou, q, 200, rng) for q in (0, 1)]
    record(10, "k_emp <= k_bound", all(r.passed for r in reps),
           ", ".join(f"q={r.instance['q']}: k_emp {r.details['k_emp']:.3g} <= k_bound {r.details['k_bound']:.3g}"
                     for r in reps) + " (200 unit cochains each)")


def test_criterion_11_empirical_band():
    t0 = time.perf_counter()
    cfg = parse_config("[space]\nkind = flat_torus\nlengths = [1.0, 1.0]\n\n"
                       "[experiment]\nepsilon = [0.06, 0.09, 0.12]\nresolution = 200\np = 1\nk_max = 10\n")
    rows, band = compare_torus(cfg)
    dt = time.perf_counter() - t0
    sizes = [i["n_centers"] for i in band["per_epsilon"]]
    ok = (band["all_positive"] and band["spread"] <= BAND_SPREAD_MAX and band["betti_match"]
          and all(i["betti_X"] == 2 for i in band["per_epsilon"]) and dt < 600)
    record(11, "eigenvalue ratio band on the torus, p = 1", ok,
           f"|X| = {sizes}, ratios in [{band['min_ratio']:.1f}, {band['max_ratio']:.1f}], "
           f"spread {band['spread']:.2f} (<= {BAND_SPREAD_MAX}), b1 = "
           f"{[i['betti_X'] for i in band['per_epsilon']]}, {dt:.1f} s (< 600 s)")
