"""Compiled inner loops of the double description method.

Zero sets of rays are bitsets packed into uint64 words. Two rays are adjacent
when the constraints they both saturate have rank n - 2. The rank is taken
modulo a 50-bit prime when every minor is known to be smaller than it, and
modulo two 31-bit primes otherwise; both routes are exact for the
Hadamard-bounded inputs accepted by ``polytope.enumerate_facets``.
"""

import numpy as np
from numba import njit

P1 = 2147483647
P2 = 2147483629
PBIG = 1125899906842597   # largest prime below 2^50


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _modinv(a, p):
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@njit(cache=True)
def _mulmod(a, b, p, pinv):
    """a * b mod p for 0 <= a, b < p < 2^50, via a floating point quotient."""
    q = np.int64(float(a) * float(b) * pinv)
    r = a * b - q * p          # exact: the true value is within a few p of zero
    while r < 0:
        r += p
    while r >= p:
        r -= p
    return r


@njit(cache=True)
def _modinv_big(a, p, pinv):
    result = 1
    base = a
    e = p - 2
    while e > 0:
        if e & 1:
            result = _mulmod(result, base, p, pinv)
        base = _mulmod(base, base, p, pinv)
        e >>= 1
    return result


@njit(cache=True)
def _rank_reaches_big(A, c, target, basis, pivcol, tmp):
    """As ``_rank_reaches`` over GF(PBIG); entries of A must lie in (-PBIG, PBIG)."""
    if target <= 0:
        return True
    p = PBIG
    pinv = 1.0 / PBIG
    n = A.shape[1]
    r = 0
    for w in range(c.shape[0]):
        word = c[w]
        if word == 0:
            continue
        for b in range(64):
            if (word >> np.uint64(b)) & np.uint64(1) == 0:
                continue
            j = w * 64 + b
            for k in range(n):
                v = A[j, k]
                tmp[k] = v + p if v < 0 else v
            for i in range(r):
                f = tmp[pivcol[i]]
                if f != 0:
                    for k in range(n):
                        bk = basis[i, k]
                        if bk != 0:
                            v = tmp[k] - _mulmod(f, bk, p, pinv)
                            tmp[k] = v + p if v < 0 else v
            lead = -1
            for k in range(n):
                if tmp[k] != 0:
                    lead = k
                    break
            if lead < 0:
                continue
            inv = _modinv_big(tmp[lead], p, pinv)
            for k in range(n):
                basis[r, k] = _mulmod(tmp[k], inv, p, pinv) if tmp[k] != 0 else 0
            pivcol[r] = lead
            r += 1
            if r >= target:
                return True
    return False


@njit(cache=True)
def _rank_reaches(A, c, target, p, basis, pivcol, tmp):
    """True when the rows of A selected by bitset ``c`` have rank >= target over GF(p)."""
    if target <= 0:
        return True
    n = A.shape[1]
    r = 0
    for w in range(c.shape[0]):
        word = c[w]
        if word == 0:
            continue
        for b in range(64):
            if (word >> np.uint64(b)) & np.uint64(1) == 0:
                continue
            j = w * 64 + b
            for k in range(n):
                tmp[k] = A[j, k] % p
            for i in range(r):
                f = tmp[pivcol[i]]
                if f != 0:
                    for k in range(n):
                        tmp[k] = (tmp[k] - f * basis[i, k]) % p
            lead = -1
            for k in range(n):
                if tmp[k] != 0:
                    lead = k
                    break
            if lead < 0:
                continue
            inv = _modinv(tmp[lead], p)
            for k in range(n):
                basis[r, k] = (tmp[k] * inv) % p
            pivcol[r] = lead
            r += 1
            if r >= target:
                return True
    return False


@njit(cache=True)
def adjacent_pairs(pos, neg, Z, A, single=False):
    """Pairs (i, j) of positive/negative rays spanning a 2-face of the current cone.

    ``single`` selects the one-prime rank test; the caller must ensure every
    minor of A is smaller than PBIG in absolute value.
    """
    n = A.shape[1]
    W = Z.shape[1]
    target = n - 2
    c = np.empty(W, dtype=np.uint64)
    basis = np.empty((max(target, 1), n), dtype=np.int64)
    pivcol = np.empty(max(target, 1), dtype=np.int64)
    tmp = np.empty(n, dtype=np.int64)
    cap = 1024
    out = np.empty((cap, 2), dtype=np.int64)
    k = 0
    for ip in range(pos.shape[0]):
        a = pos[ip]
        for iq in range(neg.shape[0]):
            b = neg[iq]
            cnt = 0
            for w in range(W):
                c[w] = Z[a, w] & Z[b, w]
                cnt += _popcount(c[w])
            if cnt < target:
                continue
            if single:
                if not _rank_reaches_big(A, c, target, basis, pivcol, tmp):
                    continue
            elif not (_rank_reaches(A, c, target, P1, basis, pivcol, tmp)
                      or _rank_reaches(A, c, target, P2, basis, pivcol, tmp)):
                continue
            if k == cap:
                grown = np.empty((2 * cap, 2), dtype=np.int64)
                grown[:cap] = out
                out = grown
                cap *= 2
            out[k, 0] = a
            out[k, 1] = b
            k += 1
    return out[:k]


@njit(cache=True)
def _gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def combine_rays(R, s, pairs, Z, word, bit):
    """New rays s[p] r_q - s[q] r_p (gcd-reduced) and their zero sets.

    Returns (rays, zero sets, overflow flag).
    """
    m = pairs.shape[0]
    n = R.shape[1]
    W = Z.shape[1]
    out = np.empty((m, n), dtype=np.int64)
    zs = np.empty((m, W), dtype=np.uint64)
    limit = 2.0 ** 61
    for t in range(m):
        p = pairs[t, 0]
        q = pairs[t, 1]
        sp = s[p]
        sq = s[q]
        g = 0
        for k in range(n):
            if abs(float(sp) * float(R[q, k])) + abs(float(sq) * float(R[p, k])) > limit:
                return out[:0], zs[:0], True
            v = sp * R[q, k] - sq * R[p, k]
            out[t, k] = v
            g = _gcd(g, v)
        if g > 1:
            for k in range(n):
                out[t, k] //= g
        for w in range(W):
            zs[t, w] = Z[p, w] & Z[q, w]
        zs[t, word] |= np.uint64(1) << np.uint64(bit)
    return out, zs, False
