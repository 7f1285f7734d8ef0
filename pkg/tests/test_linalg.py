from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellcomm.linalg import (Inequality, affine_rank, hadamard_log2, inverse, normalize,
                             nullspace, rank, rank_bareiss, rank_mod)
from oracles import exact_rank

small_mats = st.integers(1, 7).flatmap(
    lambda r: st.integers(1, 7).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@given(small_mats)
def test_rank_routes_agree(rows):
    M = np.array(rows, dtype=np.int64)
    r = exact_rank(M)
    assert rank(M) == r
    assert rank_bareiss(M) == r
    assert rank_mod(M, 2147483647) == r


def test_modular_rank_can_drop_for_small_primes():
    M = np.array([[3, 0], [0, 3]])
    assert rank_mod(M, 3) == 0
    assert rank(M) == 2


def test_large_entries_use_bareiss():
    big = 10 ** 15
    M = np.array([[big, 1], [big, 1]], dtype=object)
    assert rank(M) == 1
    assert hadamard_log2(np.array([[big, 0], [0, big]], dtype=object)) > 90


def test_normalize():
    q = normalize([Fraction(1, 2), Fraction(-3, 4)], Fraction(1, 4))
    assert q.coeffs == (2, -3) and q.bound == 1
    q = normalize([6, -9, 3], 12)
    assert q.coeffs == (2, -3, 1) and q.bound == 4
    assert q.scale == Fraction(1, 3)


def test_zero_inequality_rejected():
    with pytest.raises(ValueError):
        Inequality((0, 0), 1)


def test_affine_rank():
    assert affine_rank([[0, 0], [1, 0], [0, 1]]) == 2
    assert affine_rank([[0, 0], [1, 1], [2, 2]]) == 1
    assert affine_rank([[3, 3]]) == 0


def test_nullspace_and_inverse():
    M = [[1, 2, 3], [2, 4, 6]]
    for v in nullspace(M):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)
    assert len(nullspace(M)) == 2
    A = [[2, 1], [1, 1]]
    inv = inverse(A)
    assert inv == [[1, -1], [-1, 2]]
    with pytest.raises(ValueError):
        inverse([[1, 2], [2, 4]])
