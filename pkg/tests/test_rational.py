from fractions import Fraction
from itertools import permutations

import numpy as np
from hypothesis import given, settings, strategies as st

from hodgenerve import rational as rq


def leibniz(M):
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= M[i][perm[i]]
        total += sign * prod
    return total


small_int_matrix = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=80, deadline=None)
@given(small_int_matrix)
def test_bareiss_matches_leibniz(M):
    assert rq.bareiss_det(M) == leibniz(M)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_rank_matches_numpy(n, m, seed):
    A = np.random.default_rng(seed).integers(-1, 2, size=(n, m))
    assert rq.rank(A.tolist()) == np.linalg.matrix_rank(A)


def test_independent_columns_scan_order():
    A = [[1, 2, 0, 1], [0, 0, 1, 1]]
    assert rq.independent_columns(A) == [0, 2]


def test_inverse_exact():
    P = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    inv = rq.inverse(P)
    assert rq.matmul(P, inv) == [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert inv[0][0] == Fraction(3, 4)


def test_empty_determinant():
    assert rq.bareiss_det([]) == 1
