"""Modular Taylor expansion of a leaf and the curves it lies on.

A polynomial ``L`` of degree ``d`` that vanishes to order ``> d**2`` along the
leaf through a regular point contains that leaf (Bezout against the
algebraic leaf of degree ``<= d``).  The vanishing conditions are linear in
the coefficients of ``L``, so the existence of an algebraic leaf of degree
``<= d`` is a kernel computation.  Over ``Z/p`` the kernel can only grow, so
an empty modular kernel certifies that no such curve exists.
"""

from __future__ import annotations

import numpy as np
from sympy import QQ, prevprime

from .kernel import monomials_upto

# primes below 2**25 keep products and length-2048 convolution sums in int64
_PRIME_START = 2 ** 25


def primes(count, start=_PRIME_START):
    out, p = [], start
    while len(out) < count:
        p = prevprime(p)
        out.append(p)
    return out


def _mod(c, p):
    c = QQ.convert(c)
    den = int(c.denominator) % p
    if den == 0:
        raise ZeroDivisionError
    return (int(c.numerator) % p) * pow(den, p - 2, p) % p


def _conv(a, b, M, p):
    """Truncated product of two power series mod p."""
    if M <= 2048:
        return np.convolve(a[:M], b[:M])[:M] % p
    out = np.zeros(M, dtype=np.int64)
    # chunk the long convolution to stay inside int64
    for s in range(0, M, 2048):
        part = np.convolve(a[s:s + 2048], b[:M])[:M - s] % p
        out[s:] = (out[s:] + part) % p
    return out


def flow_series(A, B, x0, y0, M, p):
    """Taylor coefficients of the time-parametrized leaf through (x0, y0) mod p."""
    At = [(m, _mod(c, p)) for m, c in A.iterterms()]
    Bt = [(m, _mod(c, p)) for m, c in B.iterterms()]
    dxm = max([m[0] for m, _ in At + Bt] + [0])
    dym = max([m[1] for m, _ in At + Bt] + [0])
    X = np.zeros(M, dtype=np.int64)
    Y = np.zeros(M, dtype=np.int64)
    X[0], Y[0] = _mod(x0, p), _mod(y0, p)
    xp = np.zeros((dxm + 1, M), dtype=np.int64)
    yp = np.zeros((dym + 1, M), dtype=np.int64)
    xp[0, 0] = 1
    yp[0, 0] = 1
    inv = [0] + [pow(n, p - 2, p) for n in range(1, M + 1)]
    for n in range(M - 1):
        # coefficient n of every power x^i, y^j (depends on X[0..n], Y[0..n])
        for i in range(1, dxm + 1):
            xp[i, n] = int(np.dot(X[:n + 1], xp[i - 1, n::-1]) % p)
        for j in range(1, dym + 1):
            yp[j, n] = int(np.dot(Y[:n + 1], yp[j - 1, n::-1]) % p)

        def coeff(terms):
            s = 0
            for (i, j), c in terms:
                s += c * int(np.dot(xp[i, :n + 1], yp[j, n::-1]) % p)
            return s % p

        X[n + 1] = coeff(At) * inv[n + 1] % p
        Y[n + 1] = coeff(Bt) * inv[n + 1] % p
    return X, Y


def _rank_and_kernel(Mat, p):
    """Gauss-Jordan mod p; returns (rank, kernel basis as rows)."""
    Mat = Mat.copy() % p
    rows, cols = Mat.shape
    piv_cols = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(Mat[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            Mat[[r, i]] = Mat[[i, r]]
        inv = pow(int(Mat[r, c]), p - 2, p)
        Mat[r] = Mat[r] * inv % p
        col = Mat[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            Mat[nzr] = (Mat[nzr] - np.outer(col[nzr], Mat[r])) % p
        piv_cols.append(c)
        r += 1
    free = [c for c in range(cols) if c not in set(piv_cols)]
    kernel = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for row, pc in enumerate(piv_cols):
            v[pc] = (-Mat[row, f]) % p
        kernel.append(v)
    return r, kernel


class LeafJet:
    """Modular jet of the leaf through a point, with monomial series cache."""

    def __init__(self, X, point, max_degree, p):
        self.p = p
        self.max_degree = max_degree
        nmons = (max_degree + 1) * (max_degree + 2) // 2
        self.M = max(max_degree ** 2 + 1, nmons + 8)
        sx, sy = flow_series(X.A, X.B, point[0], point[1], self.M, p)
        self.xp = [np.zeros(self.M, dtype=np.int64)]
        self.xp[0][0] = 1
        self.yp = [self.xp[0].copy()]
        for _ in range(max_degree):
            self.xp.append(_conv(self.xp[-1], sx, self.M, p))
            self.yp.append(_conv(self.yp[-1], sy, self.M, p))
        self._cache = {}

    def column(self, mon, M):
        if mon not in self._cache:
            i, j = mon
            self._cache[mon] = _conv(self.xp[i], self.yp[j], self.M, self.p)
        return self._cache[mon][:M]

    def curve_kernel(self, d):
        """Kernel of the degree-``d`` vanishing conditions (rows = coefficient vectors)."""
        mons = monomials_upto(d)
        M = max(d * d + 1, len(mons) + 8)
        Mat = np.stack([self.column(m, M) for m in mons], axis=1)
        _, ker = _rank_and_kernel(Mat, self.p)
        return mons, ker


def rref_mod(rows, p):
    """Reduced row echelon form of a small integer matrix mod p."""
    Mat = np.array(rows, dtype=np.int64) % p
    nrow, ncol = Mat.shape
    r = 0
    pivots = []
    for c in range(ncol):
        if r == nrow:
            break
        nz = np.nonzero(Mat[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            Mat[[r, i]] = Mat[[i, r]]
        Mat[r] = Mat[r] * pow(int(Mat[r, c]), p - 2, p) % p
        for k in range(nrow):
            if k != r and Mat[k, c]:
                Mat[k] = (Mat[k] - Mat[k, c] * Mat[r]) % p
        pivots.append(c)
        r += 1
    return Mat[:r], pivots


def rational_reconstruction(a, m):
    """Return a fraction ``n/d`` with ``n = a*d mod m`` and ``|n|, d <= sqrt(m/2)``, or None."""
    a %= m
    bound = int((m // 2) ** 0.5)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    return QQ(r1, s1)
