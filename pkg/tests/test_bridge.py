from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellcomm.bridge import (I3322, I3322_PERM, I3322_SYM, REFERENCE_FACETS_33, bell_inequality,
                             chsh, chsh_embeddings, decompose_as_sum, evaluate, is_ns, named,
                             ns_project, orthogonal_extension, swap_parties, white_noise_value)
from bellcomm.linalg import Inequality, normalize
from bellcomm.polytope import max_over_vertices
from bellcomm.scenario import Scenario, local_vertices_embedded, vertex_matrix
from bellcomm.symmetry import canonical_form

S33, S331 = Scenario(3, 3), Scenario(3, 3, 1)


@st.composite
def bell_ineqs(draw):
    X = draw(st.integers(2, 4))
    Y = draw(st.integers(2, 4))
    s = Scenario(X, Y)
    coeffs = draw(st.lists(st.integers(-4, 4), min_size=s.dimension(), max_size=s.dimension()))
    if not any(coeffs):
        coeffs[0] = 1
    return normalize(coeffs, draw(st.integers(-6, 6)), s)


@settings(max_examples=1000)
@given(bell_ineqs())
def test_extension_projection_roundtrip(b):
    ext = orthogonal_extension(b)
    assert is_ns(ext)
    back = ns_project(ext)
    assert normalize(back.coeffs, back.bound, back.scenario) == b


@given(bell_ineqs())
def test_extension_agrees_on_local_points(b):
    s = b.scenario
    ext = orthogonal_extension(b)
    r = ext.scale / b.scale
    E = local_vertices_embedded(s.with_comm())
    V = vertex_matrix(s)
    assert [Fraction(int(x)) for x in E @ ext.vector] == [r * int(x) for x in V @ b.vector]
    assert ext.bound == r * b.bound


def test_extension_table_example():
    ext = orthogonal_extension(I3322)
    assert ext.bound == 0
    assert list(ext.block("d").ravel()) == [3, 3, 3, 3, 3, -3, 3, -3, 0]
    assert ext.block("e").tolist() == [[-1, 0, 0]] * 3
    assert list(ext.block("f")) == [-6, -3, 0]


def test_ns_projection_of_232():
    p = ns_project(REFERENCE_FACETS_33[232])
    target = np.array(I3322.coeffs) + np.array(I3322_PERM.coeffs)
    assert np.array_equal(p.vector, target)
    assert p.bound == 1


def test_projection_value_identity():
    # for NS points the one-bit inequality and its projection agree
    rng = np.random.default_rng(4)
    V = vertex_matrix(S33)
    for q in REFERENCE_FACETS_33.values():
        p = ns_project(q)
        w = rng.dirichlet(np.ones(len(V)))
        point = [Fraction(int(round(x * 1000)), 1000) for x in w @ V]
        assert evaluate(q, point) == evaluate(p, point)


def test_white_noise_values():
    assert white_noise_value(chsh()) == Fraction(-1, 2)
    assert white_noise_value(I3322) == Fraction(-1)


def test_local_bounds_of_named():
    assert max_over_vertices(chsh(), vertex_matrix(Scenario(2, 2)))[0] == 0
    for q in (I3322, I3322_SYM, I3322_PERM):
        assert max_over_vertices(q, vertex_matrix(S33))[0] == 0


def test_named():
    assert named("I3322") == I3322
    assert named("i3322-perm") == swap_parties(I3322)
    assert named("facet-196") == REFERENCE_FACETS_33[196]
    with pytest.raises(KeyError):
        named("nope")
    with pytest.raises(ValueError):
        named("i3322", Scenario(2, 2))


def test_party_swap_is_an_involution():
    assert swap_parties(swap_parties(I3322)) == I3322
    assert swap_parties(I3322_PERM) == I3322


def test_decomposition_232():
    d = decompose_as_sum(ns_project(REFERENCE_FACETS_33[232]))
    assert d is not None and d.exact
    # both terms are relabeled I3322 (its party swap is in the same relabeling class)
    assert {d.first_source, d.second_source} <= {9, 10}
    assert canonical_form(d.first) == canonical_form(d.second) == canonical_form(I3322)
    total = np.array(d.first.coeffs) + np.array(d.second.coeffs)
    assert np.array_equal(total, ns_project(REFERENCE_FACETS_33[232]).vector)


def test_decomposition_349_two_chsh():
    d = decompose_as_sum(ns_project(REFERENCE_FACETS_33[349]), chsh_embeddings(S33))
    assert d is not None and d.exact
    total = np.array(d.first.coeffs) + np.array(d.second.coeffs)
    assert np.array_equal(total, ns_project(REFERENCE_FACETS_33[349]).vector)


def test_decomposition_196_sym_plus_chsh():
    lib = [I3322_SYM] + chsh_embeddings(S33)
    d = decompose_as_sum(ns_project(REFERENCE_FACETS_33[196]), lib)
    assert d is not None and d.exact
    assert 0 in (d.first_source, d.second_source)


def test_no_decomposition():
    assert decompose_as_sum(chsh(S33), [I3322]) is None


def test_evaluate_errors():
    with pytest.raises(ValueError):
        evaluate(I3322, [0, 1])
    with pytest.raises(ValueError):
        ns_project(I3322)
    with pytest.raises(ValueError):
        orthogonal_extension(REFERENCE_FACETS_33[196])
