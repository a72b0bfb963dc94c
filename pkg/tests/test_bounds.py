import math
from fractions import Fraction

import numpy as np
import pytest

from hodgenerve.bounds import (bidiagonal, delta_norm_audit, gram_minor_audit, lower_bound_audit,
                               random_sign_matrix, rayleigh_audit, sparsity, treves_counterexample,
                               treves_norm_audit, treves_operator, coboundary_sparsity_ok)
from hodgenerve.geometry import FlatTorus
from hodgenerve.nerve import Nerve, build_nerve, nerve_stats
from hodgenerve.net import build_epsilon_net
from hodgenerve import rational as rq


def test_delta_norm_small(triangle, three_cycle):
    r = delta_norm_audit(triangle, 0)
    assert r.lhs == pytest.approx(3.0) and r.rhs == pytest.approx(6.0) and r.passed
    r = delta_norm_audit(three_cycle, 1)
    assert r.lhs == 0.0 and r.passed


def test_torus_delta_norm_and_rayleigh(torus_net_02, rng):
    T, net = torus_net_02
    nv = build_nerve(T, net, 3)
    nu = nerve_stats(nv).nu
    r = delta_norm_audit(nv, 1)
    assert r.passed and r.lhs <= 3 * nu
    assert rayleigh_audit(nv, 1, 50, rng).passed
    assert coboundary_sparsity_ok(nv, 1)


def test_lower_bound_three_cycle(three_cycle):
    r = lower_bound_audit(three_cycle, 0)
    assert r.lhs == pytest.approx(3.0)
    assert math.isclose(r.rhs, 1 / 81, rel_tol=1e-12)
    assert r.passed


def test_lower_bound_vacuous(three_cycle):
    r = lower_bound_audit(three_cycle, 1)
    assert r.passed and r.details["vacuous"]


def test_lower_bound_on_torus_nerve():
    T = FlatTorus((1.0, 1.0))
    nv = build_nerve(T, build_epsilon_net(T, 0.12, 200), 2)
    r = lower_bound_audit(nv, 1)
    assert r.passed and r.details["log_gap"] > 0


def test_identity_instance():
    inst = treves_operator(np.eye(4, dtype=int))
    assert inst.r == 4
    assert [list(row) for row in inst.B] == [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    r = treves_norm_audit(inst)
    assert r.lhs == pytest.approx(1.0) and r.passed
    g = gram_minor_audit(inst, 3)
    assert g.passed and all(e["max_minor"] <= 1 for e in g.details["minors"])


def test_bidiagonal_m4_worked_example():
    inst = treves_operator(bidiagonal(4))
    v = [1, 2, 3, 4]
    Av = rq.matvec(inst.A, [Fraction(x) for x in v])
    assert Av == [-1, -1, -1]
    BAv = inst.apply_B(Av)
    assert BAv == [-3, -2, -1, 0]
    assert sum(x * x for x in BAv) == 14 == Fraction(3 * 4 * 7, 6)
    r = treves_norm_audit(inst)
    assert r.lhs >= 14 / 3 - 1e-12
    assert math.isclose(r.rhs_log, math.log(3 * 2 ** 6))
    assert r.passed


def test_bidiagonal_gram_is_tridiagonal():
    inst = treves_operator(bidiagonal(5))
    P = np.array(inst.P)
    A = np.array(bidiagonal(5))[:, list(inst.kept)]
    assert np.array_equal(P, A.T @ A)
    # tridiagonal: 2 on the diagonal except the first column, which has one
    # nonzero, and -1 beside it
    assert np.diag(P).tolist() == [1, 2, 2, 2]
    assert np.diag(P, 1).tolist() == [-1, -1, -1]
    assert np.count_nonzero(np.triu(P, 2)) == 0
    g = gram_minor_audit(inst, 3)
    assert g.details["minors"][0]["max_minor"] == 2 and g.passed


def test_zero_column_leaves_kept_set_and_image_action():
    A = [[1, -1, 0], [0, 1, -1]]
    base = treves_operator(A)
    ext = treves_operator([row + [0] for row in A])
    assert ext.kept == base.kept
    u = [Fraction(2), Fraction(-5)]
    assert ext.apply_B(u)[:3] == base.apply_B(u)
    assert ext.apply_B(u)[3] == 0


def test_rejects_non_sign_entries():
    with pytest.raises(ValueError):
        treves_operator([[2, 0], [0, 1]])


@pytest.mark.parametrize("m,ratio", [(2, Fraction(1)), (4, Fraction(14, 3)), (50, Fraction(825))])
def test_counterexample_ratio(m, ratio):
    cx = treves_counterexample(m)
    assert cx["ratio"] == ratio == cx["expected_ratio"]
    assert cx["exact_match"]


def test_counterexample_m2_by_hand():
    cx = treves_counterexample(2)
    assert cx["Av"] == [-1] and cx["BAv"] == [-1, 0]


def test_counterexample_outgrows_linear():
    assert treves_counterexample(50)["exceeds_linear"]


def test_random_sign_matrices_respect_k():
    rng = np.random.default_rng(4)
    for _ in range(20):
        A = random_sign_matrix(rng, 12, 16, 3)
        assert sparsity(A) <= 3
        inst = treves_operator(A, 3)
        assert treves_norm_audit(inst).passed
        if inst.r <= 10:
            assert gram_minor_audit(inst, 2).passed


def test_lower_bound_is_genuinely_tight_enough_to_fail_when_violated():
    # a hand-made report with a tiny first eigenvalue must fail the comparison
    nv = Nerve.from_simplices([(0, 1)])
    r = lower_bound_audit(nv, 0, coexact=np.array([1e-300]))
    assert not r.passed


def test_counterexample_monotone_in_m():
    ratios = [treves_counterexample(m)["ratio"] for m in (2, 4, 10, 50)]
    assert ratios == sorted(ratios) and len(set(ratios)) == 4
    # slope-10 linear bound: exceeded once 2m - 1 > 60
    assert [treves_counterexample(m)["exceeds_linear"] for m in (4, 10, 50)] == [False, False, True]
