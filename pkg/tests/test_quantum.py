import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellcomm.bridge import I3322, REFERENCE_FACETS_33, chsh, ns_project
from bellcomm.quantum import (QuantumModel, SeesawConfig, bell_operator, bounds_report,
                              comm_bound, figure_of_merit, local_bound, noise_resistance,
                              quantum_value, _blocks, _random_projector, _random_state)
from bellcomm.scenario import Scenario
from oracles import born_rule_values

FAST = SeesawConfig(restarts=8, seed=1)


def _random_model(seed, X, Y):
    rng = np.random.default_rng(seed)
    return QuantumModel(_random_state(rng), [_random_projector(rng) for _ in range(X)],
                        [_random_projector(rng) for _ in range(Y)])


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.sampled_from([chsh(), I3322] + list(REFERENCE_FACETS_33.values())))
def test_born_rule_oracle(seed, q):
    s, d, e, f = _blocks(q)
    m = _random_model(seed, s.X, s.Y)
    p = born_rule_values(m.state, m.alice, m.bob)
    assert np.allclose(m.probabilities(s), p, atol=1e-12)
    coeffs = np.concatenate([d.ravel(), e, f])
    op = bell_operator(d, e, f, m.alice, m.bob)
    assert abs(np.vdot(m.state, op @ m.state).real - coeffs @ p) < 1e-12


@pytest.mark.parametrize("q", [chsh(), I3322, REFERENCE_FACETS_33[196]])
def test_monotone_trace(q):
    res = quantum_value(q, SeesawConfig(restarts=5, seed=2), keep_trace=True)
    for run in res.trace:
        assert all(b >= a - 1e-9 for a, b in zip(run, run[1:]))
        assert run


def test_chsh_value_and_state():
    res = quantum_value(chsh(), FAST)
    assert abs(res.value - (1 / np.sqrt(2) - 0.5)) < 1e-6
    assert np.allclose(res.schmidt, [1 / np.sqrt(2)] * 2, atol=1e-4)
    assert res.converged


def test_model_invariants():
    res = quantum_value(I3322, FAST)
    for P in res.model.alice + res.model.bob:
        assert np.allclose(P, P.conj().T, atol=1e-10)
        assert np.allclose(P @ P, P, atol=1e-10)
    sc = res.schmidt
    assert sc[0] >= sc[1] >= 0 and abs((sc ** 2).sum() - 1) < 1e-10


def test_reproducible():
    a = quantum_value(I3322, FAST)
    b = quantum_value(I3322, FAST)
    assert a.value == b.value and a.restart_values == b.restart_values


def test_model_json_roundtrip():
    m = quantum_value(chsh(), FAST).model
    back = QuantumModel.from_json(m.to_json())
    assert np.allclose(back.state, m.state)
    assert all(np.allclose(a, b) for a, b in zip(back.alice, m.alice))


def test_figure_of_merit():
    assert figure_of_merit(0.5, 0, 1) == 0.5
    assert figure_of_merit(0, 0, 1) == 0
    with pytest.raises(ValueError):
        figure_of_merit(0.5, 1, 1)


def test_noise_resistance():
    assert abs(noise_resistance(chsh(), 1 / np.sqrt(2) - 0.5, 0) - 1 / np.sqrt(2)) < 1e-12
    assert abs(noise_resistance(I3322, 0.25, 0) - 0.8) < 1e-12
    with pytest.raises(ValueError):
        noise_resistance(chsh(), -0.5, 0)


def test_bounds_of_232():
    q = REFERENCE_FACETS_33[232]
    assert local_bound(q) == 0 and comm_bound(q) == 1
    r = bounds_report(q, FAST)
    assert abs(r.Q - 0.5) < 1e-6 and abs(r.merit - 0.5) < 1e-6
    row = r.row()
    assert set(row) == {"L", "C", "Q", "merit", "lambda", "schmidt1", "schmidt2"}


@pytest.mark.parametrize("key", sorted(REFERENCE_FACETS_33))
def test_quantum_below_one_bit_bound(key):
    q = REFERENCE_FACETS_33[key]
    assert quantum_value(q, FAST).value <= comm_bound(q) + 1e-6


def test_config_validation():
    with pytest.raises(ValueError):
        SeesawConfig(restarts=0)
    with pytest.raises(ValueError):
        SeesawConfig(tol=0)


def test_agreement_fraction():
    res = quantum_value(chsh(), FAST)
    assert res.agreement == 1.0
    assert 0 < quantum_value(I3322, FAST).agreement <= 1
