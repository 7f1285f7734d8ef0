"""Relabelings of inputs and outputs, canonical forms and equivalence classes.

A relabeling acts on full probability tables as

    p'(ab|xy) = p(a ^ alpha[x], b ^ beta[y] | pi_A[x], pi_B[y])

and on inequality coefficient tables by the same formula. Inequalities in
Collins-Gisin-style coordinates are lifted to a full table, permuted, and
projected back using normalization; output flips therefore move weight into
the bound. No party exchange is included: the communication direction breaks
that symmetry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .linalg import Inequality, normalize
from .scenario import Scenario, polytope_dimension


@dataclass(frozen=True)
class Relabeling:
    alice_perm: tuple
    bob_perm: tuple
    alice_flips: tuple
    bob_flips: tuple

    @classmethod
    def identity(cls, s: Scenario) -> "Relabeling":
        return cls(tuple(range(s.X)), tuple(range(s.Y)), (0,) * s.X, (0,) * s.Y)

    def to_json(self) -> dict:
        return {"alice_perm": list(self.alice_perm), "bob_perm": list(self.bob_perm),
                "alice_flips": list(self.alice_flips), "bob_flips": list(self.bob_flips)}

    @classmethod
    def from_json(cls, data: dict) -> "Relabeling":
        return cls(tuple(data["alice_perm"]), tuple(data["bob_perm"]),
                   tuple(data["alice_flips"]), tuple(data["bob_flips"]))


def group_size(s: Scenario) -> int:
    from math import factorial
    return factorial(s.X) * 2 ** s.X * factorial(s.Y) * 2 ** s.Y


def group_elements(s: Scenario) -> list:
    out = []
    for pa in itertools.permutations(range(s.X)):
        for pb in itertools.permutations(range(s.Y)):
            for fa in itertools.product((0, 1), repeat=s.X):
                for fb in itertools.product((0, 1), repeat=s.Y):
                    out.append(Relabeling(pa, pb, fa, fb))
    return out


# ---------------------------------------------------------------------------
# full-table form


@dataclass
class FullTableForm:
    """Coefficients c[a, b, x, y] of p(ab|xy) plus a bound (``sum c p <= bound``)."""

    table: np.ndarray
    bound: object


def lift(coeffs: Sequence, bound, s: Scenario) -> FullTableForm:
    v = np.asarray(coeffs, dtype=object) if not isinstance(coeffs, np.ndarray) else coeffs
    X, Y = s.X, s.Y
    d = v[s.joint_slice].reshape(X, Y)
    f = v[s.alice_slice]
    c = np.zeros((2, 2, X, Y), dtype=v.dtype)
    c[0, 0] += d
    if s.comm:
        e = v[s.bob_slice].reshape(X, Y)
        c[0, 0] += e
        c[1, 0] += e
    else:
        e = v[s.bob_slice]
        c[0, 0, 0] += e
        c[1, 0, 0] += e
    # Alice's marginal is read off at y = 0
    c[0, 0, :, 0] += f
    c[0, 1, :, 0] += f
    return FullTableForm(c, bound)


def project(form: FullTableForm, s: Scenario) -> tuple:
    """Back to (coeffs, bound) using sum_ab p(ab|xy) = 1 and no-signalling where it holds."""
    c = form.table
    d = c[0, 0] - c[1, 0] - c[0, 1] + c[1, 1]
    eb = c[1, 0] - c[1, 1]
    e = eb.ravel() if s.comm else eb.sum(axis=0)
    f = (c[0, 1] - c[1, 1]).sum(axis=1)
    bound = form.bound - c[1, 1].sum()
    return np.concatenate([d.ravel(), e, f]), bound


def permute_table(table: np.ndarray, g: Relabeling) -> np.ndarray:
    X, Y = table.shape[2], table.shape[3]
    out = np.empty_like(table)
    for a, b, x, y in itertools.product((0, 1), (0, 1), range(X), range(Y)):
        out[a, b, x, y] = table[a ^ g.alice_flips[x], b ^ g.bob_flips[y],
                                g.alice_perm[x], g.bob_perm[y]]
    return out


def relabeling_matrix(g: Relabeling, s: Scenario) -> np.ndarray:
    """Integer matrix M with (coeffs', bound') = M @ (coeffs, bound)."""
    D = polytope_dimension(s)
    M = np.zeros((D + 1, D + 1), dtype=np.int64)
    for j in range(D + 1):
        unit = np.zeros(D + 1, dtype=np.int64)
        unit[j] = 1
        form = lift(unit[:D], unit[D], s)
        coeffs, bound = project(FullTableForm(permute_table(form.table, g), form.bound), s)
        M[:D, j] = coeffs
        M[D, j] = bound
    return M


_group_cache: dict = {}


def group_matrices(s: Scenario) -> np.ndarray:
    """Stack of relabeling matrices in ``group_elements`` order, shape (G, D+1, D+1)."""
    if s not in _group_cache:
        mats = np.stack([relabeling_matrix(g, s) for g in group_elements(s)])
        mats.setflags(write=False)
        _group_cache[s] = mats
    return _group_cache[s]


def apply_relabeling(ineq: Inequality, g: Relabeling, s: Optional[Scenario] = None) -> Inequality:
    s = s or ineq.scenario
    if len(ineq.coeffs) != polytope_dimension(s):
        raise ValueError("dimension mismatch")
    form = lift(np.array(ineq.coeffs, dtype=object), ineq.bound, s)
    coeffs, bound = project(FullTableForm(permute_table(form.table, g), form.bound), s)
    return normalize(coeffs, bound, s)


def relabel_points(points: np.ndarray, g: Relabeling, s: Scenario) -> np.ndarray:
    """Apply ``g`` to distributions given in the coordinates of ``s``."""
    P = np.atleast_2d(np.asarray(points))
    X, Y = s.X, s.Y
    out = []
    for p in P:
        joint = p[s.joint_slice].reshape(X, Y)
        bob = p[s.bob_slice].reshape(X, Y) if s.comm else np.tile(p[s.bob_slice], (X, 1))
        alice = np.tile(p[s.alice_slice][:, None], (1, Y))
        t = np.empty((2, 2, X, Y), dtype=P.dtype)
        t[0, 0] = joint
        t[1, 0] = bob - joint
        t[0, 1] = alice - joint
        t[1, 1] = 1 - alice - bob + joint
        t = permute_table(t, g)
        b = t[0, 0] + t[1, 0]
        out.append(np.concatenate([t[0, 0].ravel(), b.ravel() if s.comm else b[0],
                                   (t[0, 0] + t[0, 1])[:, 0]]))
    out = np.array(out, dtype=P.dtype)
    return out[0] if np.asarray(points).ndim == 1 else out


# ---------------------------------------------------------------------------
# canonical forms


def orbit(ineq: Inequality, s: Optional[Scenario] = None) -> np.ndarray:
    """All images of ``ineq`` as rows (coeffs..., bound), one per group element."""
    s = s or ineq.scenario
    v = np.array(ineq.key(), dtype=np.int64)
    return group_matrices(s) @ v


def _lexmin(rows: np.ndarray) -> np.ndarray:
    order = np.lexsort(rows.T[::-1])
    return rows[order[0]]


def canonical_form(ineq: Inequality, s: Optional[Scenario] = None) -> Inequality:
    """Lexicographically smallest (coeffs..., bound) over the relabeling orbit."""
    s = s or ineq.scenario
    best = _lexmin(orbit(ineq, s))
    return Inequality(tuple(int(x) for x in best[:-1]), int(best[-1]), s)


def orbit_size(ineq: Inequality, s: Optional[Scenario] = None) -> int:
    return len(np.unique(orbit(ineq, s), axis=0))


def canonical_keys(ineqs: Sequence, s: Scenario, chunk: int = 256) -> list:
    """Canonical (coeffs..., bound) tuples for many inequalities at once."""
    mats = group_matrices(s)
    keys = []
    for start in range(0, len(ineqs), chunk):
        V = np.array([q.key() for q in ineqs[start:start + chunk]], dtype=np.int64)
        imgs = np.einsum("gij,nj->ngi", mats, V)
        keys.extend(tuple(int(x) for x in _lexmin(rows)) for rows in imgs)
    return keys


@dataclass
class FacetClass:
    class_id: int
    representative: Inequality
    orbit_size: int
    members_count: int
    found_by: set = field(default_factory=set)
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"class_id": self.class_id,
               "representative": {"coeffs": list(self.representative.coeffs),
                                  "bound": self.representative.bound},
               "orbit_size": self.orbit_size, "members_count": self.members_count}
        if self.found_by:
            out["found_by"] = sorted(self.found_by)
        out.update(self.data)
        return out


@dataclass
class FacetCatalog:
    scenario: Scenario
    classes: list

    def __len__(self):
        return len(self.classes)

    def representatives(self) -> list:
        return [c.representative for c in self.classes]

    def keys(self) -> set:
        return {c.representative.key() for c in self.classes}

    def to_json(self) -> dict:
        s = self.scenario
        return {"scenario": {"X": s.X, "Y": s.Y, "comm": s.comm},
                "classes": [c.to_json() for c in self.classes]}

    @classmethod
    def from_json(cls, data: dict) -> "FacetCatalog":
        sc = data["scenario"]
        s = Scenario(sc["X"], sc["Y"], sc["comm"])
        classes = []
        for c in data["classes"]:
            rep = c["representative"]
            extra = {k: v for k, v in c.items()
                     if k not in ("class_id", "representative", "orbit_size",
                                  "members_count", "found_by")}
            classes.append(FacetClass(c["class_id"],
                                      Inequality(tuple(rep["coeffs"]), rep["bound"], s),
                                      c["orbit_size"], c["members_count"],
                                      set(c.get("found_by", ())), extra))
        return cls(s, classes)


def reduce_to_classes(ineqs: Iterable, s: Scenario, sources: Optional[Sequence] = None) -> FacetCatalog:
    """Group inequalities by canonical form.

    ``sources`` optionally gives, per inequality, a label recorded in ``found_by``.
    """
    ineqs = list(ineqs)
    for q in ineqs:
        if q.scenario is not None and q.scenario != s:
            raise ValueError(f"inequality from {q.scenario} in a {s} reduction")
    keys = canonical_keys(ineqs, s)
    groups: dict = {}
    for i, k in enumerate(keys):
        groups.setdefault(k, []).append(i)
    classes = []
    for cid, k in enumerate(sorted(groups)):
        rep = Inequality(k[:-1], k[-1], s)
        members = groups[k]
        found = {sources[i] for i in members} if sources is not None else set()
        classes.append(FacetClass(cid, rep, orbit_size(rep, s), len(members), found))
    return FacetCatalog(s, classes)
