"""See-saw lower bounds on quantum values with two qubits and projective measurements.

For a Bell inequality in Collins-Gisin form the Bell operator is

    B = sum d_xy A_x (x) B_y + sum e'_y 1 (x) B_y + sum f_x A_x (x) 1

with A_x, B_y the projectors onto outcome 0. Each round replaces the state by
the top eigenvector of B, then every projector by the projector onto the
positive eigenspace of its conditional operator. Each update can only raise
the value, so the value is monotone within a restart.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .bridge import evaluate, ns_project, white_noise_value
from .linalg import Inequality
from .polytope import max_over_vertices
from .scenario import Scenario, local_vertices_embedded, vertex_matrix

log = logging.getLogger(__name__)

I2 = np.eye(2, dtype=complex)


@dataclass
class QuantumModel:
    state: np.ndarray
    alice: list
    bob: list

    @property
    def schmidt(self) -> np.ndarray:
        return np.linalg.svd(self.state.reshape(2, 2), compute_uv=False)

    def probabilities(self, s: Scenario) -> np.ndarray:
        """Born-rule point in the Bell coordinates of ``s``: p(00|xy), pB(0|y), pA(0|x)."""
        psi = self.state
        joint = [np.vdot(psi, np.kron(A, B) @ psi).real for A in self.alice for B in self.bob]
        bob = [np.vdot(psi, np.kron(I2, B) @ psi).real for B in self.bob]
        alice = [np.vdot(psi, np.kron(A, I2) @ psi).real for A in self.alice]
        return np.array(joint + bob + alice)

    def to_json(self) -> dict:
        def mat(M):
            return {"re": M.real.tolist(), "im": M.imag.tolist()}
        return {"state": {"re": self.state.real.tolist(), "im": self.state.imag.tolist()},
                "schmidt": self.schmidt.tolist(),
                "alice": [mat(A) for A in self.alice], "bob": [mat(B) for B in self.bob]}

    @classmethod
    def from_json(cls, data: dict) -> "QuantumModel":
        def mat(d):
            return np.array(d["re"]) + 1j * np.array(d["im"])
        st = np.array(data["state"]["re"]) + 1j * np.array(data["state"]["im"])
        return cls(st, [mat(a) for a in data["alice"]], [mat(b) for b in data["bob"]])


@dataclass
class SeesawConfig:
    restarts: int = 50
    max_iters: int = 1000
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class SeesawResult:
    value: float
    model: QuantumModel
    converged: bool
    restart_values: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def schmidt(self) -> np.ndarray:
        return self.model.schmidt

    @property
    def agreement(self) -> float:
        """Fraction of restarts ending within 1e-6 of the best value."""
        if not self.restart_values:
            return 1.0
        return sum(v >= self.value - 1e-6 for v in self.restart_values) / len(self.restart_values)


def _blocks(ineq: Inequality):
    s = ineq.scenario
    if s.comm:
        ineq = ns_project(ineq)
        s = ineq.scenario
    d = ineq.block("d").astype(float)
    e = ineq.block("e").astype(float)
    f = ineq.block("f").astype(float)
    return s, d, e, f


def bell_operator(d, e, f, alice, bob) -> np.ndarray:
    B = np.zeros((4, 4), dtype=complex)
    for x, A in enumerate(alice):
        B += f[x] * np.kron(A, I2)
        for y, Bp in enumerate(bob):
            if d[x, y]:
                B += d[x, y] * np.kron(A, Bp)
    for y, Bp in enumerate(bob):
        B += e[y] * np.kron(I2, Bp)
    return B


def _positive_projector(K):
    w, U = np.linalg.eigh((K + K.conj().T) / 2)
    cols = U[:, w > 0]
    return cols @ cols.conj().T


def _random_projector(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def _random_state(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def _value(d, e, f, psi, alice, bob):
    return float(np.vdot(psi, bell_operator(d, e, f, alice, bob) @ psi).real)


def _seesaw_once(d, e, f, rng, cfg: SeesawConfig, trace: Optional[list] = None):
    X, Y = d.shape
    alice = [_random_projector(rng) for _ in range(X)]
    bob = [_random_projector(rng) for _ in range(Y)]
    psi = _random_state(rng)
    best = -math.inf
    converged = False
    for _ in range(cfg.max_iters):
        w, U = np.linalg.eigh(bell_operator(d, e, f, alice, bob))
        psi = U[:, -1]
        rho = np.outer(psi, psi.conj()).reshape(2, 2, 2, 2)
        # Alice's conditional operators: Tr_B[rho (1 x O_x)], O_x = sum_y d_xy B_y + f_x 1
        for x in range(X):
            O = f[x] * I2 + sum(d[x, y] * bob[y] for y in range(Y))
            K = np.einsum("ijkl,lj->ik", rho, O)
            alice[x] = _positive_projector(K)
        for y in range(Y):
            O = e[y] * I2 + sum(d[x, y] * alice[x] for x in range(X))
            K = np.einsum("ijkl,ki->jl", rho, O)
            bob[y] = _positive_projector(K)
        value = _value(d, e, f, psi, alice, bob)
        if trace is not None:
            trace.append(value)
        if value < best - 1e-9:
            raise AssertionError(f"see-saw value decreased: {best} -> {value}")
        if value - best < cfg.tol:
            best = max(best, value)
            converged = True
            break
        best = value
    return best, QuantumModel(psi, alice, bob), converged


def quantum_value(ineq: Inequality, cfg: Optional[SeesawConfig] = None,
                  keep_trace: bool = False) -> SeesawResult:
    """Best value of the inequality found by see-saw over two-qubit models.

    One-bit inequalities are evaluated through their NS projection. The result
    is a lower bound on the quantum maximum.
    """
    cfg = cfg or SeesawConfig()
    s, d, e, f = _blocks(ineq)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    values = []
    trace: list = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        run_trace: Optional[list] = [] if keep_trace else None
        val, model, conv = _seesaw_once(d, e, f, rng, cfg, run_trace)
        values.append(val)
        if keep_trace:
            trace.append(run_trace)
        if best is None or val > best[0]:
            best = (val, model, conv)
    if not best[2]:
        log.warning("see-saw did not converge within %d iterations", cfg.max_iters)
    res = SeesawResult(best[0], best[1], best[2], values, trace)
    if res.agreement < 0.9:
        log.warning("only %.0f%% of restarts reached the best value %.6f",
                    100 * res.agreement, res.value)
    return res


def figure_of_merit(Q: float, L, C) -> float:
    """(Q - L) / (C - L)."""
    if C == L:
        raise ValueError("figure of merit undefined when C == L")
    if C < L:
        raise ValueError("need C > L")
    return (Q - float(L)) / (float(C) - float(L))


def noise_resistance(ineq: Inequality, Q: float, L) -> float:
    """Critical weight lambda with lambda Q + (1 - lambda) N = L, N the white-noise value."""
    N = float(white_noise_value(ineq if not ineq.scenario.comm else ns_project(ineq)))
    if Q <= N:
        raise ValueError("noise resistance undefined for Q <= white-noise value")
    return (float(L) - N) / (Q - N)


@dataclass
class BoundsReport:
    L: int
    C: int
    Q: float
    merit: Optional[float]
    lam: Optional[float]
    model: QuantumModel

    def row(self) -> dict:
        sc = self.model.schmidt
        return {"L": self.L, "C": self.C, "Q": self.Q, "merit": self.merit,
                "lambda": self.lam, "schmidt1": float(sc[0]), "schmidt2": float(sc[1])}


def local_bound(ineq: Inequality) -> int:
    s = ineq.scenario
    if s.comm:
        return max_over_vertices(ineq, local_vertices_embedded(s))[0]
    return max_over_vertices(ineq, vertex_matrix(s))[0]


def comm_bound(ineq: Inequality) -> int:
    return max_over_vertices(ineq, vertex_matrix(ineq.scenario.with_comm()))[0]


def bounds_report(ineq: Inequality, cfg: Optional[SeesawConfig] = None) -> BoundsReport:
    """L and C exactly from vertices, Q by see-saw on the NS projection, then merit and lambda."""
    L = local_bound(ineq)
    C = comm_bound(ineq)
    res = quantum_value(ineq, cfg)
    merit = figure_of_merit(res.value, L, C) if C > L else None
    lam = None
    if res.value > L:
        try:
            lam = noise_resistance(ineq, res.value, L)
        except ValueError:
            lam = None
    return BoundsReport(L, C, res.value, merit, lam, res.model)
