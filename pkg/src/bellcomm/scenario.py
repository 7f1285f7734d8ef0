"""Bell scenarios with binary outcomes, optionally with one bit sent from Alice to Bob.

Coordinates follow a fixed serialization. For a scenario with one bit of
communication (``comm=1``) a point is

    [p(00|xy) for x, y (x-major)] + [pB(0|xy), same order] + [pA(0|x)]

and for the plain Bell scenario (``comm=0``) it is the Collins-Gisin vector

    [p(00|xy) for x, y (x-major)] + [pB(0|y)] + [pA(0|x)]

Outputs of deterministic strategies are stored as indicators of outcome 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class Scenario:
    X: int
    Y: int
    comm: int = 0

    def __post_init__(self):
        if self.X < 2 or self.Y < 2:
            raise ValueError(f"need X >= 2 and Y >= 2, got X={self.X}, Y={self.Y}")
        if self.comm not in (0, 1):
            raise ValueError(f"comm must be 0 or 1, got {self.comm}")

    def dimension(self) -> int:
        return polytope_dimension(self)

    @property
    def n_joint(self) -> int:
        return self.X * self.Y

    @property
    def n_bob(self) -> int:
        return self.X * self.Y if self.comm else self.Y

    # slices into a coordinate (or coefficient) vector
    @property
    def joint_slice(self) -> slice:
        return slice(0, self.n_joint)

    @property
    def bob_slice(self) -> slice:
        return slice(self.n_joint, self.n_joint + self.n_bob)

    @property
    def alice_slice(self) -> slice:
        start = self.n_joint + self.n_bob
        return slice(start, start + self.X)

    def local(self) -> "Scenario":
        """The same inputs without communication."""
        return Scenario(self.X, self.Y, 0)

    def with_comm(self) -> "Scenario":
        return Scenario(self.X, self.Y, 1)

    def __str__(self):
        return f"{self.X}{self.Y}+1" if self.comm else f"{self.X}{self.Y}"


def polytope_dimension(s: Scenario) -> int:
    if s.comm:
        return s.X + 2 * s.X * s.Y
    return s.X + s.Y + s.X * s.Y


@dataclass(frozen=True)
class CommPartition:
    """Split of Alice's inputs by the value of the communicated bit.

    ``block0`` always contains input 0, which fixes the gauge of the bit label.
    """

    block0: frozenset
    block1: frozenset

    def __post_init__(self):
        object.__setattr__(self, "block0", frozenset(self.block0))
        object.__setattr__(self, "block1", frozenset(self.block1))
        if not self.block0 or not self.block1:
            raise ValueError("both blocks must be non-empty")
        if self.block0 & self.block1:
            raise ValueError("blocks must be disjoint")
        if 0 not in self.block0:
            raise ValueError("input 0 must belong to block0")

    def bit(self, x: int) -> int:
        return 0 if x in self.block0 else 1

    def bits(self, X: int) -> tuple:
        return tuple(self.bit(x) for x in range(X))


def stirling2_2(X: int) -> int:
    """Number of ways to split X labelled items into two non-empty blocks."""
    return 2 ** (X - 1) - 1


def comm_partitions(X: int) -> list[CommPartition]:
    if X < 2:
        raise ValueError("need X >= 2")
    out = []
    # input 0 sits in block0; every non-empty subset of the rest can be block1
    for mask in range(1, 2 ** (X - 1)):
        block1 = frozenset(x for x in range(1, X) if mask >> (x - 1) & 1)
        out.append(CommPartition(frozenset(range(X)) - block1, block1))
    return out


@dataclass(frozen=True)
class StrategyVertex:
    """A deterministic strategy. ``bob_out[c][y]`` is the indicator of b=0 given bit c."""

    alice_out: tuple
    bob_out: tuple
    partition: Optional[CommPartition] = None
    coords: tuple = field(default=(), compare=False)

    def bit(self, x: int) -> int:
        return 0 if self.partition is None else self.partition.bit(x)


def vertex_coords(v: StrategyVertex, s: Scenario) -> np.ndarray:
    X, Y = s.X, s.Y
    a = np.asarray(v.alice_out, dtype=np.int64)
    if s.comm:
        bob = np.array([[v.bob_out[v.bit(x)][y] for y in range(Y)] for x in range(X)],
                       dtype=np.int64)
        joint = a[:, None] * bob
        return np.concatenate([joint.ravel(), bob.ravel(), a])
    if v.partition is not None:
        raise ValueError("a strategy using the bit has no coordinates without communication")
    b = np.asarray(v.bob_out[0], dtype=np.int64)
    return np.concatenate([np.outer(a, b).ravel(), b, a])


def _make(a, tables, partition, s):
    v = StrategyVertex(tuple(a), tuple(tuple(t) for t in tables), partition)
    coords = tuple(int(c) for c in vertex_coords(v, s))
    return StrategyVertex(v.alice_out, v.bob_out, partition, coords)


def enumerate_vertices(s: Scenario) -> list[StrategyVertex]:
    """All deterministic strategies of ``s`` without repetitions.

    With communication, Bob tables that ignore the bit are stored once without
    a partition, so the list has 2^X (2^Y + S(X,2) (2^2Y - 2^Y)) entries.
    """
    X, Y = s.X, s.Y
    alice = list(itertools.product((1, 0), repeat=X))
    bob = list(itertools.product((1, 0), repeat=Y))
    out = []
    for a in alice:
        for b in bob:
            out.append(_make(a, (b,), None, s))
        if not s.comm:
            continue
        for part in comm_partitions(X):
            for b0 in bob:
                for b1 in bob:
                    if b0 != b1:
                        out.append(_make(a, (b0, b1), part, s))
    return out


def expected_vertex_count(s: Scenario) -> int:
    if s.comm:
        return 2 ** s.X * (2 ** s.Y + stirling2_2(s.X) * (2 ** (2 * s.Y) - 2 ** s.Y))
    return 2 ** s.X * 2 ** s.Y


_matrix_cache: dict = {}


def vertex_matrix(s: Scenario) -> np.ndarray:
    """Vertices of ``s`` as rows of a read-only int64 matrix (same order as enumerate_vertices)."""
    if s not in _matrix_cache:
        m = np.array([v.coords for v in enumerate_vertices(s)], dtype=np.int64)
        m.setflags(write=False)
        _matrix_cache[s] = m
    return _matrix_cache[s]


def embed_local(points: np.ndarray, s: Scenario) -> np.ndarray:
    """Map points of the Bell space of ``s`` into its one-bit space (Bob marginal copied over x)."""
    points = np.asarray(points)
    single = points.ndim == 1
    P = np.atleast_2d(points)
    X, Y = s.X, s.Y
    joint = P[:, : X * Y]
    bob = P[:, X * Y: X * Y + Y]
    alice = P[:, X * Y + Y:]
    out = np.concatenate([joint, np.tile(bob, (1, X)), alice], axis=1)
    return out[0] if single else out


def local_vertices_embedded(s: Scenario) -> np.ndarray:
    """Deterministic local strategies written in the one-bit coordinates of ``s``."""
    return embed_local(vertex_matrix(s.local()), s.with_comm())


def white_noise_point(s: Scenario) -> np.ndarray:
    """The uniform distribution, exactly: p(00|xy)=1/4 and every marginal 1/2."""
    p = np.full(polytope_dimension(s), Fraction(1, 2), dtype=object)
    p[s.joint_slice] = Fraction(1, 4)
    return p
