import numpy as np
import pytest
from hypothesis import given, settings, strategies as st, assume

from bellcomm import _kernels
from bellcomm.bridge import chsh
from bellcomm.linalg import Inequality, affine_rank
from bellcomm.polytope import (BudgetExceeded, DDState, VRep, enumerate_facets, is_facet,
                               max_over_vertices, partial_facets)
from bellcomm.scenario import Scenario, vertex_matrix
from oracles import brute_force_facets, exact_rank


def _keys(facets):
    return {(f.ineq.coeffs, f.ineq.bound) for f in facets}


def test_square():
    v = VRep([[0, 0], [1, 0], [0, 1], [1, 1]])
    keys = _keys(enumerate_facets(v))
    assert keys == {((-1, 0), 0), ((0, -1), 0), ((1, 0), 1), ((0, 1), 1)}


def test_cross_polytope():
    pts = []
    for i in range(4):
        for sgn in (1, -1):
            p = [0] * 4
            p[i] = sgn
            pts.append(p)
    facets = enumerate_facets(VRep(pts), certify=True)
    assert len(facets) == 16
    assert all(len(f.saturators) == 4 for f in facets)


def test_local_22():
    facets = enumerate_facets(VRep(vertex_matrix(Scenario(2, 2))), certify=True)
    assert len(facets) == 24
    assert _keys(facets) == brute_force_facets(vertex_matrix(Scenario(2, 2)))


@pytest.mark.parametrize("ordering", ["lex", "lexmin", "random", "maxcutoff", "mincutoff"])
def test_ordering_independent(ordering):
    V = vertex_matrix(Scenario(2, 2, 1))
    ref = _keys(enumerate_facets(VRep(V)))
    assert _keys(enumerate_facets(VRep(V), ordering=ordering, seed=3)) == ref


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_rank_routes_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    A = np.hstack([np.ones((40, 1), dtype=np.int64), rng.integers(-3, 4, size=(40, n - 1))])
    Z = np.zeros((6, 1), dtype=np.uint64)
    for r in range(6):
        for j in rng.choice(40, size=int(rng.integers(n - 2, 12)), replace=False):
            Z[r, 0] |= np.uint64(1) << np.uint64(j)
    pos, neg = np.arange(3), np.arange(3, 6)
    one = _kernels.adjacent_pairs(pos, neg, Z, A, True)
    two = _kernels.adjacent_pairs(pos, neg, Z, A, False)
    assert np.array_equal(one, two)
    expected = []
    for a in pos:
        for b in neg:
            rows = [j for j in range(40) if (int(Z[a, 0]) & int(Z[b, 0])) >> j & 1]
            if len(rows) >= n - 2 and exact_rank(A[rows]) >= n - 2:
                expected.append((a, b))
    assert [tuple(p) for p in one] == expected


@st.composite
def small_polytopes(draw):
    d = draw(st.integers(2, 6))
    m = draw(st.integers(d + 1, 20))
    rows = draw(st.lists(st.tuples(*[st.integers(-3, 3)] * d), min_size=m, max_size=m,
                         unique=True))
    return np.array(rows, dtype=np.int64)


@settings(max_examples=50)
@given(small_polytopes())
def test_dd_matches_brute_force(V):
    assume(affine_rank(V) == V.shape[1])
    assert _keys(enumerate_facets(VRep(V))) == brute_force_facets(V)


def test_certificate():
    v = VRep(vertex_matrix(Scenario(2, 2)))
    c = chsh()
    cert = is_facet(c, v)
    assert cert.is_facet and cert.valid and cert.rank == 7 and len(cert.saturators) == 8
    loose = Inequality(c.coeffs, 1)
    assert not is_facet(loose, v).is_facet and is_facet(loose, v).valid
    tight = Inequality(c.coeffs, -1)
    assert not is_facet(tight, v).valid and is_facet(tight, v).violators


def test_max_over_vertices():
    best, where = max_over_vertices(chsh(), vertex_matrix(Scenario(2, 2)))
    assert best == 0 and len(where) == 8


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        VRep([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        VRep([[0.5, 0]])
    with pytest.raises(ValueError):
        enumerate_facets(VRep([[0, 0], [1, 1], [2, 2]]))


def test_budget_checkpoint_and_resume(tmp_path):
    V = VRep(vertex_matrix(Scenario(3, 2, 1)))
    ref = _keys(enumerate_facets(V))
    path = tmp_path / "dd.npz"
    with pytest.raises(BudgetExceeded) as info:
        enumerate_facets(V, max_rays=1000, checkpoint=str(path))
    assert info.value.checkpoint == str(path) and path.exists()
    state = DDState.load(path)
    assert state.steps == info.value.state.steps
    part = partial_facets(state, V)
    assert _keys(part) <= ref
    assert _keys(enumerate_facets(V, resume=str(path))) == ref


def test_checkpoint_for_other_vertices_rejected(tmp_path):
    path = tmp_path / "dd.npz"
    with pytest.raises(BudgetExceeded):
        enumerate_facets(VRep(vertex_matrix(Scenario(2, 2, 1))), max_rays=11, checkpoint=str(path))
    with pytest.raises(ValueError):
        enumerate_facets(VRep(vertex_matrix(Scenario(2, 2))), resume=str(path))


def test_time_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_facets(VRep(vertex_matrix(Scenario(3, 2, 1))), time_limit=0.0)
