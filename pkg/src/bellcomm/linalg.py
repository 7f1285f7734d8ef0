"""Exact rational kernels: inequality normalization, rank, affine rank, nullspaces.

Ranks of integer matrices are computed modulo two primes below 2^31. Whenever the
Hadamard bound of the matrix is below the product of the primes the larger of
the two modular ranks equals the rational rank, so the result is exact; other
inputs fall back to fraction-free elimination over Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

PRIMES = (2147483647, 2147483629)
_LOG2_PRIME_PRODUCT = sum(math.log2(p) for p in PRIMES)


@dataclass(frozen=True)
class Inequality:
    """``coeffs . p <= bound`` with coprime integer data.

    ``scenario`` (optional) fixes the coordinate layout; ``scale`` records the
    positive factor that was applied to reach the integer form.
    """

    coeffs: tuple
    bound: int
    scenario: Optional[object] = None
    scale: Fraction = field(default=Fraction(1), compare=False)

    def __post_init__(self):
        if not any(self.coeffs):
            raise ValueError("the zero vector is not an inequality")
        if self.scenario is not None and len(self.coeffs) != self.scenario.dimension():
            raise ValueError(f"{len(self.coeffs)} coefficients for scenario {self.scenario}")

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    @property
    def space(self) -> Optional[str]:
        if self.scenario is None:
            return None
        return "comm" if self.scenario.comm else "bell"

    def key(self) -> tuple:
        return tuple(self.coeffs) + (self.bound,)

    def block(self, name: str) -> np.ndarray:
        s = self.scenario
        v = self.vector
        if name == "d":
            return v[s.joint_slice].reshape(s.X, s.Y)
        if name == "e":
            e = v[s.bob_slice]
            return e.reshape(s.X, s.Y) if s.comm else e
        if name == "f":
            return v[s.alice_slice]
        raise KeyError(name)

    def value(self, point) -> object:
        return sum(int(c) * p for c, p in zip(self.coeffs, point) if c)

    def __repr__(self):
        where = f", {self.scenario}" if self.scenario is not None else ""
        return f"Inequality({list(self.coeffs)} <= {self.bound}{where})"


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def normalize(coeffs: Sequence, bound, scenario=None) -> Inequality:
    """Scale ``coeffs . p <= bound`` by a positive rational to coprime integers."""
    coeffs = [Fraction(c) for c in coeffs]
    bound = Fraction(bound)
    if not any(coeffs):
        raise ValueError("cannot normalize the zero vector")
    den = _lcm([c.denominator for c in coeffs] + [bound.denominator])
    ints = [int(c * den) for c in coeffs]
    b = int(bound * den)
    g = math.gcd(*ints, b)
    return Inequality(tuple(c // g for c in ints), b // g, scenario, Fraction(den, g))


# ---------------------------------------------------------------------------
# ranks


def _as_integer_rows(M) -> list:
    """Rows of a rational matrix, each scaled by a positive integer to become integral."""
    rows = []
    for row in M:
        fr = [Fraction(x) for x in row]
        den = _lcm([f.denominator for f in fr])
        rows.append([int(f * den) for f in fr])
    return rows


def _is_integer_array(M) -> bool:
    return isinstance(M, np.ndarray) and M.dtype.kind in "iub"


def hadamard_log2(M: np.ndarray) -> float:
    """log2 of an upper bound on the absolute value of every minor of ``M``."""
    if M.size == 0:
        return 0.0
    norms = np.sqrt((M.astype(np.float64) ** 2).sum(axis=1))
    norms = np.sort(norms[norms > 0])[::-1][: min(M.shape)]
    # float rounding is covered by the safety margin used by callers
    return float(np.log2(norms).sum()) if norms.size else 0.0


def rank_mod(M: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over GF(p), p < 2^31."""
    A = np.mod(np.asarray(M, dtype=np.int64), p)
    m, n = A.shape
    r = 0
    for col in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, col]), p - 2, p)
        A[r] = (A[r] * inv) % p
        others = np.nonzero(A[:, col])[0]
        others = others[others != r]
        if others.size:
            A[others] = (A[others] - (A[others, col][:, None] * A[r]) % p) % p
        r += 1
    return r


def rank_bareiss(M) -> int:
    """Exact rank by fraction-free elimination, largest-magnitude pivot first."""
    rows = [row for row in _as_integer_rows(M) if any(row)]
    if not rows:
        return 0
    n = len(rows[0])
    r = 0
    prev = 1
    for col in range(n):
        if r == len(rows):
            break
        best = max(range(r, len(rows)), key=lambda i: abs(rows[i][col]))
        if rows[best][col] == 0:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r]
        pv = piv[col]
        for i in range(r + 1, len(rows)):
            ri = rows[i]
            a = ri[col]
            rows[i] = [(pv * ri[j] - a * piv[j]) // prev for j in range(n)]
        prev = pv
        r += 1
    return r


def rank(M) -> int:
    """Exact rank of a rational (or integer) matrix."""
    if _is_integer_array(M):
        A = np.asarray(M, dtype=np.int64)
        if A.ndim != 2 or A.size == 0:
            return 0
        if hadamard_log2(A) < _LOG2_PRIME_PRODUCT - 2:
            r = rank_mod(A, PRIMES[0])
            if r == min(A.shape):
                return r
            return max(r, rank_mod(A, PRIMES[1]))
        return rank_bareiss(A.tolist())
    rows = _as_integer_rows(M)
    if not rows:
        return 0
    return _rank_int_rows(rows)


def _rank_int_rows(rows) -> int:
    big = max((abs(x) for row in rows for x in row), default=0)
    if big < 2 ** 31:
        return rank(np.array(rows, dtype=np.int64))
    return rank_bareiss(rows)


def affine_rank(points) -> int:
    """Dimension of the affine hull of a non-empty list of equal-length points."""
    if len(points) == 0:
        raise ValueError("need at least one point")
    if _is_integer_array(points):
        P = np.asarray(points, dtype=np.int64)
        return rank(P[1:] - P[0])
    P = [[Fraction(x) for x in p] for p in points]
    base = P[0]
    return rank([[x - y for x, y in zip(p, base)] for p in P[1:]]) if len(P) > 1 else 0


# ---------------------------------------------------------------------------
# exact solving


def rref(M) -> tuple:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    A = [[Fraction(x) for x in row] for row in M]
    if not A:
        return [], []
    m, n = len(A), len(A[0])
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pv = A[r][col]
        A[r] = [x / pv for x in A[r]]
        for i in range(m):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return A[:r], pivots


def nullspace(M, ncols: Optional[int] = None) -> list:
    """Integer basis (coprime rows) of the right nullspace of ``M``."""
    M = [list(row) for row in M]
    n = len(M[0]) if M else ncols
    R, pivots = rref(M)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for fj in free:
        v = [Fraction(0)] * n
        v[fj] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[fj]
        den = _lcm([x.denominator for x in v])
        ints = [int(x * den) for x in v]
        g = math.gcd(*ints)
        basis.append([x // g for x in ints])
    return basis


def inverse(M) -> list:
    """Exact inverse of a square rational matrix as a list of Fraction rows."""
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(R) < n:
        raise np.linalg.LinAlgError("singular matrix")
    return [row[n:] for row in R]


def independent_rows(M: np.ndarray, order=None) -> list:
    """Greedy maximal set of linearly independent rows of an integer matrix, in ``order``."""
    M = np.asarray(M, dtype=np.int64)
    order = range(len(M)) if order is None else order
    chosen: list = []
    target = rank(M)
    for i in order:
        if rank(M[chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == target:
                break
    return chosen
