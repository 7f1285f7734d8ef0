"""Moving inequalities between the Bell space and the one-bit space.

Bell inequalities live in Collins-Gisin coordinates (d_xy, e'_y, f_x); one-bit
inequalities in (d_xy, e_xy, f_x). A one-bit point lies in the no-signalling
(NS) subspace when its Bob marginal does not depend on x, and a one-bit
coefficient vector is NS when e_xy does not depend on x.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .linalg import Inequality, normalize
from .scenario import Scenario, embed_local, white_noise_point
from .symmetry import group_matrices


def bell_inequality(d, e, f, bound, s: Scenario) -> Inequality:
    """Bell inequality from its blocks: joint table d[x][y], Bob marginals e[y], Alice marginals f[x]."""
    s = s.local()
    d = np.asarray(d, dtype=object).reshape(s.X, s.Y)
    return normalize(list(d.ravel()) + list(e) + list(f), bound, s)


def comm_inequality(d, e, f, bound, s: Scenario) -> Inequality:
    """One-bit inequality from d[x][y], e[x][y], f[x]."""
    s = s.with_comm()
    d = np.asarray(d, dtype=object).reshape(s.X, s.Y)
    e = np.asarray(e, dtype=object).reshape(s.X, s.Y)
    return normalize(list(d.ravel()) + list(e.ravel()) + list(f), bound, s)


def orthogonal_extension(b: Inequality, s: Optional[Scenario] = None) -> Inequality:
    """Lift a Bell inequality to the one-bit space with e_xy = e'_y / X.

    Everything is multiplied by X before gcd normalization, so the result is
    integral; the applied factor is kept in ``scale``.
    """
    src = b.scenario
    s = (s or src).with_comm()
    if src is None or src.comm or (src.X, src.Y) != (s.X, s.Y):
        raise ValueError("need a Bell inequality of the same input counts")
    X = s.X
    d = [X * c for c in b.block("d").ravel()]
    e = [int(c) for c in b.block("e")] * X
    f = [X * c for c in b.block("f")]
    out = normalize(d + e + f, X * b.bound, s)
    return Inequality(out.coeffs, out.bound, s, out.scale * X * b.scale)


def ns_project(c: Inequality) -> Inequality:
    """Intersect with the NS subspace: e'_y = sum_x e_xy; d, f and the bound are kept as they are."""
    s = c.scenario
    if s is None or not s.comm:
        raise ValueError("need a one-bit inequality")
    e = c.block("e").sum(axis=0)
    coeffs = list(c.block("d").ravel()) + list(e) + list(c.block("f"))
    return Inequality(tuple(int(x) for x in coeffs), c.bound, s.local())


def is_ns(c: Inequality) -> bool:
    e = c.block("e")
    return bool((e == e[0]).all())


def evaluate(ineq: Inequality, point) -> object:
    """Inner product of the coefficients with a point.

    A Bell-space point given to a one-bit inequality is embedded first (Bob's
    marginal copied over x). Exact for rational points.
    """
    s = ineq.scenario
    point = np.asarray(point, dtype=object)
    if s is not None and s.comm and len(point) == s.local().dimension():
        point = embed_local(point, s)
    if len(point) != len(ineq.coeffs):
        raise ValueError(f"point of length {len(point)} for {len(ineq.coeffs)} coefficients")
    return sum((int(c) * p for c, p in zip(ineq.coeffs, point) if c), Fraction(0))


def white_noise_value(ineq: Inequality) -> Fraction:
    return evaluate(ineq, white_noise_point(ineq.scenario))


def swap_parties(b: Inequality) -> Inequality:
    """Exchange Alice and Bob (X = Y only): d -> d^T, Alice and Bob marginals swapped."""
    s = b.scenario
    if s.comm or s.X != s.Y:
        raise ValueError("party exchange needs a Bell scenario with X = Y")
    return bell_inequality(b.block("d").T, b.block("f"), b.block("e"), b.bound, s)


# ---------------------------------------------------------------------------
# named inequalities


def chsh(s: Scenario = Scenario(2, 2), xs: Sequence = (0, 1), ys: Sequence = (0, 1)) -> Inequality:
    """CHSH on Alice inputs ``xs`` and Bob inputs ``ys``; the -1 sits at (xs[1], ys[1])."""
    s = s.local()
    d = np.zeros((s.X, s.Y), dtype=int)
    d[xs[0], ys[0]] = d[xs[0], ys[1]] = d[xs[1], ys[0]] = 1
    d[xs[1], ys[1]] = -1
    e = np.zeros(s.Y, dtype=int)
    f = np.zeros(s.X, dtype=int)
    e[ys[0]] = -1
    f[xs[0]] = -1
    return bell_inequality(d, e, f, 0, s)


_S33 = Scenario(3, 3)

I3322 = bell_inequality([[1, 1, 1], [1, 1, -1], [1, -1, 0]], [-1, 0, 0], [-2, -1, 0], 0, _S33)
I3322_SYM = bell_inequality([[0, 1, 1], [1, -1, 1], [1, 1, -1]], [-1, -1, 0], [-1, -1, 0], 0, _S33)
I3322_PERM = swap_parties(I3322)


def named(name: str, s: Optional[Scenario] = None) -> Inequality:
    """Shortcuts: chsh, i3322, i3322-sym, i3322-perm, and facet-N for the reference 33+1 facets."""
    key = name.lower().replace("_", "-")
    if key == "chsh":
        return chsh(s or Scenario(2, 2))
    if key.startswith("facet"):
        num = key[5:].lstrip("-")
        if not num.isdigit() or int(num) not in REFERENCE_FACETS_33:
            raise KeyError(f"unknown inequality {name!r}")
        return REFERENCE_FACETS_33[int(num)]
    table = {"i3322": I3322, "i3322-sym": I3322_SYM, "i3322-perm": I3322_PERM}
    if key not in table:
        raise KeyError(f"unknown inequality {name!r}")
    if s is not None and (s.X, s.Y) != (3, 3):
        raise ValueError(f"{name} lives in the 33 scenario")
    return table[key]


# Reference facets of the 33+1 polytope with L = 0 and C = 1, keyed by their catalog number.
REFERENCE_FACETS_33 = {
    232: comm_inequality([[2, 2, 2], [2, 2, -2], [2, -2, 0]],
                         [[-1, -1, -1], [-1, -1, 1], [-1, 1, 0]], [-3, -1, 0], 1, _S33),
    195: comm_inequality([[2, 2, 2], [2, -2, 1], [2, 1, -2]],
                         [[-1, -1, -1], [-1, 1, 0], [-1, -1, 1]], [-3, -1, 0], 1, _S33),
    349: comm_inequality([[-1, 0, 1], [0, 1, -1], [1, 1, 2]],
                         [[0, 0, 0], [0, 0, 0], [0, -1, -1]], [0, 0, -2], 1, _S33),
    529: comm_inequality([[0, 1, 1], [1, 1, -1], [1, -1, 1]],
                         [[0, 0, -1], [-1, -1, 1], [0, 0, 0]], [-1, 0, -1], 1, _S33),
    380: comm_inequality([[-1, 1, 0], [0, 2, 2], [1, 1, 0]],
                         [[0, -1, 1], [1, -1, -1], [-1, 0, -1]], [0, -2, -1], 1, _S33),
    196: comm_inequality([[0, 1, 1], [2, -1, 2], [2, 1, -2]],
                         [[0, 0, 0], [-1, 0, -1], [-1, -1, 1]], [-1, -2, 0], 1, _S33),
}


def chsh_embeddings(s: Scenario) -> list:
    """CHSH on every pair of inputs of each party (relabelings cover the rest)."""
    from itertools import combinations
    return [chsh(s, xs, ys) for xs in combinations(range(s.X), 2)
            for ys in combinations(range(s.Y), 2)]


def default_library(s: Scenario) -> list:
    """CHSH embeddings, plus I3322 and its party-exchanged form for the 33 scenario."""
    s = s.local()
    lib = chsh_embeddings(s)
    if (s.X, s.Y) == (3, 3):
        lib += [I3322, I3322_PERM]
    return lib


# ---------------------------------------------------------------------------
# decomposition into relabeled library members


@dataclass(frozen=True)
class Decomposition:
    first: Inequality
    second: Optional[Inequality]
    residual: tuple
    first_source: int
    second_source: Optional[int]

    @property
    def exact(self) -> bool:
        return not any(self.residual)


def _orbit_table(library, s):
    """Distinct relabeled coefficient vectors of the library, mapped to (image, source index)."""
    mats = group_matrices(s)
    table: dict = {}
    for li, ineq in enumerate(library):
        for row in mats @ np.array(ineq.key(), dtype=np.int64):
            key = tuple(int(x) for x in row[:-1])
            table.setdefault(key, (Inequality(key, int(row[-1]), s), li))
    return table


def decompose_as_sum(b: Inequality, library: Optional[Sequence] = None, s: Optional[Scenario] = None,
                     point=None, tol: float = 1e-9) -> Optional[Decomposition]:
    """Write the coefficients of ``b`` as the sum of two relabeled library members.

    The search is exhaustive over pairs of orbit elements; bounds are ignored
    (only coefficient vectors are matched). With ``point`` given, a single
    member plus a residual whose value at ``point`` is zero (within ``tol``)
    is accepted when no exact pair exists. Returns None when nothing is found.
    """
    s = (s or b.scenario).local()
    library = default_library(s) if library is None else library
    table = _orbit_table(library, s)
    target = np.array(b.coeffs, dtype=np.int64)
    found = []
    for key, (img, src) in table.items():
        rest = tuple(int(x) for x in target - np.array(key))
        if rest in table:
            other, osrc = table[rest]
            found.append((key, rest, img, src, other, osrc))
    if found:
        key, rest, img, src, other, osrc = min(found)
        return Decomposition(img, other, (0,) * len(target), src, osrc)
    if point is None:
        return None
    point = np.asarray(point, dtype=float)
    singles = []
    for key, (img, src) in table.items():
        residual = target - np.array(key)
        if abs(float(residual @ point)) <= tol:
            singles.append((int(np.abs(residual).sum()), key, img, src, tuple(int(x) for x in residual)))
    if not singles:
        return None
    _, _, img, src, residual = min(singles)
    return Decomposition(img, None, residual, src, None)
