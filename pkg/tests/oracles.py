"""Independent reference computations used by the tests.

Nothing here calls the package's rank or double description code.
"""

import itertools
from fractions import Fraction
from math import gcd

import numpy as np


def _normal_gcd(row):
    g = 0
    for x in row:
        g = gcd(g, int(x))
    return g


def brute_force_facets(V):
    """Facets of conv(V) for a full-dimensional integer point set, by exhaustion.

    Every facet is spanned by d affinely independent vertices; the normal is
    the vector of signed (d-1)-minors of the difference matrix. Determinants
    of small integer matrices are computed in floating point and rounded,
    with an integrality check.
    """
    V = np.asarray(V, dtype=np.int64)
    m, d = V.shape
    found = set()
    combos = np.array(list(itertools.combinations(range(m), d)), dtype=np.int64)
    if len(combos) == 0:
        return found
    base = V[combos[:, 0]]
    diffs = (V[combos[:, 1:]] - base[:, None, :]).astype(float)   # (k, d-1, d)
    normals = np.empty((len(combos), d))
    for j in range(d):
        minor = np.delete(diffs, j, axis=2)
        det = np.linalg.det(minor) if d > 1 else np.ones(len(combos))
        normals[:, j] = (-1) ** j * det
    rounded = np.rint(normals)
    assert np.abs(normals - rounded).max() < 1e-6
    normals = rounded.astype(np.int64)
    nz = np.any(normals != 0, axis=1)
    for n, p0 in zip(normals[nz], base[nz]):
        vals = V @ n
        b = int(n @ p0)
        if vals.max() <= b:
            c, bound = n, b
        elif vals.min() >= b:
            c, bound = -n, -b
        else:
            continue
        g = gcd(_normal_gcd(c), abs(bound))
        found.add((tuple(int(x) // g for x in c), bound // g))
    return found


def born_rule_values(state, alice, bob):
    """p(00|xy), pB(0|y), pA(0|x) from explicit tensor products."""
    rho = np.outer(state, state.conj())
    eye = np.eye(2)
    joint = [np.trace(rho @ np.kron(A, B)).real for A in alice for B in bob]
    pb = [np.trace(rho @ np.kron(eye, B)).real for B in bob]
    pa = [np.trace(rho @ np.kron(A, eye)).real for A in alice]
    return np.array(joint + pb + pa)


def count_one_bit_strategies(X, Y):
    """Distinct one-bit vertices by listing every (a, c, b0, b1) strategy."""
    seen = set()
    for a in itertools.product((0, 1), repeat=X):
        for c in itertools.product((0, 1), repeat=X):
            for b0 in itertools.product((0, 1), repeat=Y):
                for b1 in itertools.product((0, 1), repeat=Y):
                    bob = [b1 if c[x] else b0 for x in range(X)]
                    pt = tuple(a[x] * bob[x][y] for x in range(X) for y in range(Y))
                    pt += tuple(bob[x][y] for x in range(X) for y in range(Y)) + a
                    seen.add(pt)
    return len(seen)


def exact_rank(M):
    """Gaussian elimination over the rationals."""
    rows = [[Fraction(int(x)) for x in r] for r in np.asarray(M)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r
