"""Vertex-to-facet conversion, facet certificates and exact bounds over vertex lists.

Facets are found with the double description method on the homogenized cone
spanned by the rows (1, v). Rays of the dual cone {y : y . (1, v) >= 0} are
inequalities ``b - c . v >= 0``, i.e. ``c . v <= b``.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .linalg import (Inequality, _LOG2_PRIME_PRODUCT, affine_rank, hadamard_log2,
                     independent_rows, inverse, normalize, rank)

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


class BudgetExceeded(RuntimeError):
    """Raised when facet enumeration runs out of its ray or time budget.

    ``checkpoint`` is the path of the saved state (or None if no path was given),
    ``state`` the in-memory state that ``enumerate_facets(resume=...)`` accepts.
    """

    def __init__(self, message, checkpoint=None, state=None):
        super().__init__(message)
        self.checkpoint = checkpoint
        self.state = state


@dataclass
class VRep:
    vertices: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        V = _integer_vertices(self.vertices)
        if len(V) == 0:
            raise ValueError("empty vertex list")
        if len({tuple(r) for r in V.tolist()}) != len(V):
            raise ValueError("duplicate vertices")
        self.vertices = V
        self.dim = affine_rank(V)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    def __len__(self):
        return len(self.vertices)


def _integer_vertices(vertices) -> np.ndarray:
    V = np.asarray(vertices)
    if V.dtype.kind in "iub":
        return V.astype(np.int64)
    rows = [[Fraction(x) for x in row] for row in vertices]
    if any(x.denominator != 1 for row in rows for x in row):
        raise ValueError("vertices must be integral")
    return np.array([[int(x) for x in row] for row in rows], dtype=np.int64)


@dataclass(frozen=True)
class Facet:
    ineq: Inequality
    saturators: tuple


@dataclass(frozen=True)
class FacetCertificate:
    is_facet: bool
    valid: bool
    saturators: tuple
    rank: int
    violators: tuple = ()

    def __bool__(self):
        return self.is_facet


def values(ineq: Inequality, vertices) -> np.ndarray:
    V = np.asarray(vertices, dtype=np.int64)
    return V @ ineq.vector


def max_over_vertices(ineq: Inequality, vertices) -> tuple:
    """Exact maximum of ``coeffs . v`` over the rows of ``vertices`` and every index attaining it."""
    vals = values(ineq, vertices)
    if ineq.vector.shape[0] != np.asarray(vertices).shape[1]:
        raise ValueError("dimension mismatch")
    best = int(vals.max())
    return best, tuple(int(i) for i in np.nonzero(vals == best)[0])


def is_facet(ineq: Inequality, v: VRep) -> FacetCertificate:
    """Validity over all vertices plus affine rank dim - 1 of the saturating set."""
    vals = values(ineq, v.vertices)
    violators = tuple(int(i) for i in np.nonzero(vals > ineq.bound)[0])
    sat = tuple(int(i) for i in np.nonzero(vals == ineq.bound)[0])
    r = affine_rank(v.vertices[list(sat)]) if sat else -1
    valid = not violators
    return FacetCertificate(valid and r == v.dim - 1, valid, sat, r, violators)


# ---------------------------------------------------------------------------
# double description


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Bool matrix (k, m) to uint64 words (k, ceil(m/64)), bit j of row i = bits[i, j]."""
    k, m = bits.shape
    W = (m + 63) // 64
    padded = np.zeros((k, W * 64), dtype=np.uint8)
    padded[:, :m] = bits
    packed = np.packbits(padded.reshape(k, W, 64), axis=2, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(k, W).astype(np.uint64)


def _unpack_bits(Z: np.ndarray, m: int) -> np.ndarray:
    k, W = Z.shape
    out = np.zeros((k, W * 64), dtype=bool)
    for b in range(64):
        out[:, b::64] = (Z >> np.uint64(b)) & np.uint64(1)
    return out[:, :m]


def _choose_next(R, A, remaining, ordering, rng):
    if ordering in ("lex", "lexmin"):
        return 0
    if ordering == "random":
        return int(rng.integers(len(remaining)))
    # count rays cut off by each candidate constraint; heuristic only, so float32 is fine
    Rf = R.astype(np.float32)
    sub = A[remaining].astype(np.float32).T
    counts = np.zeros(len(remaining), dtype=np.int64)
    zeros = np.zeros(len(remaining), dtype=np.int64)
    for start in range(0, len(Rf), 20000):
        S = Rf[start:start + 20000] @ sub
        counts += (S < -0.5).sum(axis=0)
        zeros += (np.abs(S) < 0.5).sum(axis=0)
    if ordering == "mincutoff":
        return int(np.argmin(counts))
    if ordering == "maxcutoff":
        return int(np.argmax(counts))
    raise ValueError(f"unknown ordering {ordering!r}")


@dataclass
class DDState:
    A: np.ndarray
    rays: np.ndarray
    zsets: np.ndarray
    processed: list
    remaining: list
    ordering: str
    steps: int = 0

    def save(self, path):
        header = {"format": "bellcomm-dd-checkpoint", "version": CHECKPOINT_VERSION,
                  "ordering": self.ordering, "steps": self.steps,
                  "constraints": int(self.A.shape[0]), "width": int(self.A.shape[1]),
                  "rays": int(self.rays.shape[0])}
        tmp = str(path) + ".tmp.npz"
        np.savez_compressed(tmp, header=np.array(json.dumps(header)), A=self.A,
                            rays=self.rays, zsets=self.zsets,
                            processed=np.array(self.processed, dtype=np.int64),
                            remaining=np.array(self.remaining, dtype=np.int64))
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "DDState":
        with np.load(path) as data:
            header = json.loads(str(data["header"]))
            if header.get("format") != "bellcomm-dd-checkpoint":
                raise ValueError(f"{path} is not a checkpoint")
            if header["version"] != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {header['version']}")
            return cls(data["A"], data["rays"], data["zsets"], data["processed"].tolist(),
                       data["remaining"].tolist(), header["ordering"], header["steps"])


def _initial_state(A, ordering, seed) -> DDState:
    m, n = A.shape
    rng = np.random.default_rng(seed)
    order = list(range(m))
    if ordering == "random":
        order = rng.permutation(m).tolist()
    elif ordering == "lexmin":
        # rows of the homogenized matrix in ascending lexicographic order
        order = np.lexsort(A.T[::-1]).tolist()
    basis = independent_rows(A, order)
    if len(basis) != n:
        raise ValueError("vertices are not full-dimensional")
    inv = inverse(A[basis].tolist())
    rays = []
    for col in range(n):
        column = [inv[r][col] for r in range(n)]
        rays.append(normalize(column, 0).coeffs)
    R = np.array(rays, dtype=np.int64)
    bits = np.zeros((n, m), dtype=bool)
    for i, row in enumerate(basis):
        bits[:, row] = True
        bits[i, row] = False
    chosen = set(basis)
    return DDState(A, R, _pack_bits(bits), list(basis),
                   [j for j in order if j not in chosen], ordering)


def _step(state: DDState, pos_in_remaining: int):
    A = state.A
    j = state.remaining.pop(pos_in_remaining)
    R, Z = state.rays, state.zsets
    s = R @ A[j]
    pos = np.nonzero(s > 0)[0]
    neg = np.nonzero(s < 0)[0]
    zer = np.nonzero(s == 0)[0]
    word, bit = divmod(j, 64)
    mask = np.uint64(1) << np.uint64(bit)
    if len(neg) == 0:
        Z[zer, word] |= mask
        state.processed.append(j)
        state.steps += 1
        return
    single = hadamard_log2(A) < math.log2(_kernels.PBIG) - 2
    pairs = _kernels.adjacent_pairs(pos, neg, Z, A, single)
    newR, newZ, overflow = _kernels.combine_rays(R, s, pairs, Z, word, bit)
    if overflow:
        raise OverflowError("ray coordinates exceed the int64 range")
    keepZ = Z[np.concatenate([pos, zer])]
    keepZ[len(pos):, word] |= mask
    state.rays = np.concatenate([R[pos], R[zer], newR])
    state.zsets = np.concatenate([keepZ, newZ])
    state.processed.append(j)
    state.steps += 1


def enumerate_facets(v: VRep, ordering: str = "lex", max_rays: Optional[int] = None,
                     time_limit: Optional[float] = None, checkpoint: Optional[str] = None,
                     checkpoint_every: float = 60.0, resume=None, seed: int = 0,
                     certify: bool = False) -> list:
    """All facets of conv(vertices) as a list of :class:`Facet`.

    ``ordering`` picks the next vertex to insert: ``lex`` (input order,
    default), ``lexmin`` (lexicographically sorted vertices), ``maxcutoff``,
    ``mincutoff`` or ``random``. The result is sorted
    by inequality so it does not depend on the ordering. ``resume`` takes a
    checkpoint path or a :class:`DDState`.
    """
    if not v.full_dimensional:
        raise ValueError(f"vertices span dimension {v.dim} < {v.ambient_dim}")
    m = len(v)
    A = np.hstack([np.ones((m, 1), dtype=np.int64), v.vertices])
    if hadamard_log2(A) >= _LOG2_PRIME_PRODUCT - 2:
        raise ValueError("vertex coordinates too large for the exact modular adjacency test")
    if resume is not None:
        state = DDState.load(resume) if isinstance(resume, (str, os.PathLike)) else resume
        if state.A.shape != A.shape or not np.array_equal(state.A, A):
            raise ValueError("checkpoint belongs to a different vertex set")
    else:
        state = _initial_state(A, ordering, seed)
    rng = np.random.default_rng(seed + state.steps)
    t0 = time.monotonic()
    last_save = t0
    while state.remaining:
        i = _choose_next(state.rays, A, state.remaining, state.ordering, rng)
        _step(state, i)
        now = time.monotonic()
        if checkpoint and now - last_save > checkpoint_every:
            state.save(checkpoint)
            last_save = now
        over_rays = max_rays is not None and len(state.rays) > max_rays
        over_time = time_limit is not None and now - t0 > time_limit
        if over_rays or over_time:
            if checkpoint:
                state.save(checkpoint)
            what = f"{len(state.rays)} rays" if over_rays else f"{now - t0:.0f} s"
            raise BudgetExceeded(f"budget exceeded after {state.steps} steps ({what})",
                                 checkpoint, state)
        if state.steps % 50 == 0:
            log.debug("dd step %d: %d rays, %d remaining", state.steps, len(state.rays),
                      len(state.remaining))
    return _facets_from_state(state, v, certify)


def _facets_from_state(state: DDState, v: VRep, certify: bool) -> list:
    m = len(v)
    bits = _unpack_bits(state.zsets, m)
    facets = []
    for ray, zb in zip(state.rays, bits):
        ray = [int(x) for x in ray]
        ineq = normalize([-x for x in ray[1:]], ray[0])
        facets.append(Facet(ineq, tuple(int(i) for i in np.nonzero(zb)[0])))
    facets.sort(key=lambda f: f.ineq.key())
    if certify:
        for f in facets:
            cert = is_facet(f.ineq, v)
            if not cert or cert.saturators != f.saturators:
                raise AssertionError(f"double description produced a non-facet {f.ineq}")
    return facets


def partial_facets(state: DDState, v: VRep) -> list:
    """Facets already certain in an unfinished enumeration.

    A ray of the intermediate cone saturates a rank n - 1 set of processed
    vertices; if it is also valid on the vertices not yet inserted it is a
    facet of the final polytope. The result is a subset of the complete list.
    """
    if not np.array_equal(state.A[:, 1:], v.vertices):
        raise ValueError("state belongs to a different vertex set")
    facets = []
    for f in _facets_from_state(state, v, certify=False):
        cert = is_facet(f.ineq, v)
        if cert:
            facets.append(Facet(f.ineq, cert.saturators))
    return facets


def with_scenario(facets: Sequence, scenario) -> list:
    """Attach a scenario to facet inequalities (coordinate layout tag only)."""
    return [Facet(Inequality(f.ineq.coeffs, f.ineq.bound, scenario, f.ineq.scale), f.saturators)
            for f in facets]
