"""Exponential solutions of ``Z'' = r Z`` over Q(x)(y), Kovacic case 1.

The base coefficient field is Q(x); the derivation is d/dy.  Only local
data lying in Q(x) are explored: irregular finite poles are handled when
the pole is linear in y, regular ones whenever the leading Laurent
coefficient is in Q(x).
"""

from __future__ import annotations

from itertools import product

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .kernel import (
    QQxy, QQxy_field, as_frac, coeffs_in, degree_in, dy, factor, is_constant, num_den,
)

_K = QQxy_field
_KD = QQxy_field.to_domain()


def poly_sqrt(p):
    """Exact square root of a polynomial over Q, or None."""
    if p.is_zero:
        return p
    c, facs = p.sqf_list()
    if any(k % 2 for _, k in facs):
        return None
    c = QQ.convert(c)
    if c < 0:
        return None
    n, d = int(c.numerator), int(c.denominator)
    rn, rd = _isqrt(n), _isqrt(d)
    if rn is None or rd is None:
        return None
    out = p.ring(QQ(rn, rd))
    for g, k in facs:
        out *= g ** (k // 2)
    return out


def _isqrt(n):
    from math import isqrt
    r = isqrt(n)
    return r if r * r == n else None


def frac_sqrt(f):
    """Exact square root in Q(x, y), or None."""
    n, d = num_den(as_frac(f))
    s = poly_sqrt(n * d)
    if s is None:
        return None
    return as_frac(s) / as_frac(d)


def _ycoeffs(p):
    """Coefficients of ``p`` in y as elements of Q(x) (list index = power)."""
    cs = coeffs_in(p, 1)
    top = max(cs) if cs else -1
    return [as_frac(cs.get(j, QQxy.zero)) for j in range(top + 1)]


def _series_div(num, den, n):
    """Power series quotient ``num/den`` to ``n`` terms (den[0] != 0)."""
    out = []
    inv0 = 1 / den[0]
    for k in range(n):
        acc = num[k] if k < len(num) else _K.zero
        for i in range(1, min(k, len(den) - 1) + 1):
            acc -= den[i] * out[k - i]
        out.append(acc * inv0)
    return out


def _series_sqrt(c, n):
    s0 = frac_sqrt(c[0])
    if s0 is None:
        return None
    out = [s0]
    for k in range(1, n):
        acc = c[k] if k < len(c) else _K.zero
        for i in range(1, k):
            acc -= out[i] * out[k - i]
        out.append(acc / (2 * s0))
    return out


def laurent_infinity(f, nterms):
    """``f = sum_k c_k y^(top-k)``: returns ``(top, [c_0, c_1, ...])``."""
    n, d = num_den(as_frac(f))
    N, D = _ycoeffs(n), _ycoeffs(d)
    top = (len(N) - 1) - (len(D) - 1)
    return top, _series_div(N[::-1], D[::-1], nterms)


def eval_y(p, theta):
    """``p(x, theta)`` for ``theta`` in Q(x)."""
    acc = _K.zero
    pw = _K.one
    for c in _ycoeffs(p):
        acc += c * pw
        pw *= theta
    return acc


def _taylor_at(p, theta, n):
    out = []
    q = p
    fact = 1
    for k in range(n):
        out.append(eval_y(q, theta) / fact)
        q = q.diff(QQxy.gens[1])
        fact *= (k + 1)
    return out


def laurent_at(f, theta, nterms):
    """Laurent expansion at ``y = theta``: ``(lowest exponent, coefficients)``."""
    n, d = num_den(as_frac(f))
    N = _taylor_at(n, theta, nterms + degree_in(d, 1) + 1)
    D = _taylor_at(d, theta, degree_in(d, 1) + 1)
    v = next(i for i, c in enumerate(D) if c != 0)
    w = next((i for i, c in enumerate(N) if c != 0), None)
    if w is None:
        return 0, [_K.zero] * nterms
    return w - v, _series_div(N[w:], D[v:], nterms)


def _root_of_linear(f):
    cs = _ycoeffs(f)
    return -cs[0] / cs[1]


def _residue_coefficient(f, g):
    """``g(theta)`` for roots ``theta`` of ``f`` when it is the same element of Q(x).

    ``g`` is a rational function regular on ``f = 0``.  Returns None if the
    value depends on the root.
    """
    if degree_in(f, 1) == 1:
        return _ycoeffs_value(g, _root_of_linear(f))
    n, d = num_den(g)
    rn = _rem_qx(n, f)
    rd = _rem_qx(d, f)
    # rn = beta * rd coefficientwise in y with beta in Q(x)
    if all(c == 0 for c in rn):
        return _K.zero
    beta = None
    for a, b in zip(rn + [_K.zero] * (len(rd) - len(rn)), rd + [_K.zero] * (len(rn) - len(rd))):
        if b == 0:
            if a != 0:
                return None
            continue
        q = a / b
        if beta is None:
            beta = q
        elif beta != q:
            return None
    return beta


def _ycoeffs_value(g, theta):
    n, d = num_den(g)
    return eval_y(n, theta) / eval_y(d, theta)


def _rem_qx(p, f):
    """Remainder of ``p`` modulo ``f`` in Q(x)[y], as a coefficient list."""
    P = _ycoeffs(p)
    Fc = _ycoeffs(f)
    df = len(Fc) - 1
    P = list(P)
    while len(P) - 1 >= df and any(c != 0 for c in P):
        if P[-1] == 0:
            P.pop()
            continue
        q = P[-1] / Fc[-1]
        shift = len(P) - 1 - df
        for i, c in enumerate(Fc):
            P[shift + i] -= q * c
        P.pop()
    return P


def _laurent_value(c):
    return c


class Unsupported(Exception):
    pass


def _pole_options(r, f, mult):
    """Candidate ``(singular part, exponent)`` pairs at the pole ``f``."""
    if mult == 1:
        return [(_K.zero, _K.one)]
    if mult == 2:
        b = _residue_coefficient(f, r * as_frac(f) ** 2 / as_frac(dy(f)) ** 2)
        if b is None:
            raise Unsupported("second-order pole with coefficient outside Q(x)")
        sq = frac_sqrt(1 + 4 * b)
        if sq is None:
            return []
        half = QQ(1, 2)
        return [(_K.zero, half + half * sq), (_K.zero, half - half * sq)]
    if mult % 2:
        return []
    if degree_in(f, 1) != 1:
        raise Unsupported("irregular pole of degree > 1 in y")
    mu = mult // 2
    theta = _root_of_linear(f)
    low, ser = laurent_at(r, theta, mult + 1)
    # r = ser[0] t^-2mu + ...; sqrt r = t^-mu * sqrt(ser)
    sq = _series_sqrt(ser, mu + 1)
    if sq is None:
        return []
    t = as_frac(f) / as_frac(coeffs_in(f, 1)[1])  # y - theta
    part = _K.zero
    for j in range(mu - 1):  # exponents -mu .. -2
        part += sq[j] / t ** (mu - j)
    a = sq[0]
    # b = coefficient of t^(-mu-1) in r - part^2
    _, ser2 = laurent_at(r - part ** 2, theta, mult + 1)
    low2, _ = laurent_at(r - part ** 2, theta, 1)
    b = ser2[(-mu - 1) - low2] if (-mu - 1) - low2 >= 0 and (-mu - 1) - low2 < len(ser2) else _K.zero
    half = QQ(1, 2)
    return [(part, half * (b / a + mu)), (-part, half * (-b / a + mu))]


def _infinity_options(r):
    n, d = num_den(r)
    half = QQ(1, 2)
    o = degree_in(d, 1) - degree_in(n, 1) if r != 0 else 3
    if o > 2:
        return [(_K.zero, _K.zero), (_K.zero, _K.one)]
    if o == 2:
        top, ser = laurent_infinity(r, 1)
        b = ser[0]
        sq = frac_sqrt(1 + 4 * b)
        if sq is None:
            return []
        return [(_K.zero, half + half * sq), (_K.zero, half - half * sq)]
    if o <= 0 and o % 2 == 0:
        nu = -o // 2
        top, ser = laurent_infinity(r, 2 * nu + 2)
        sq = _series_sqrt(ser, nu + 1)
        if sq is None:
            return []
        Y = _K.gens[1]
        part = _K.zero
        for j in range(nu + 1):
            part += sq[j] * Y ** (nu - j)
        a = sq[0]
        diff_ = r - part ** 2
        if diff_ == 0:
            b = _K.zero
        else:
            t2, ser2 = laurent_infinity(diff_, 2 * nu + 2)
            idx = t2 - (nu - 1)
            b = ser2[idx] if 0 <= idx < len(ser2) else _K.zero
        return [(part, half * (b / a - nu)), (-part, half * (-b / a - nu))]
    return []


def _poly_solutions(omega, r, d):
    """Polynomials P in y of degree d over Q(x) with P'' + 2 w P' + (w' + w^2 - r) P = 0."""
    Y = _K.gens[1]
    coef = dy(omega) + omega ** 2 - r
    images = []
    for j in range(d + 1):
        m = Y ** j
        images.append(dy(dy(m)) + 2 * omega * dy(m) + coef * m)
    dens = [num_den(im)[1] for im in images]
    from functools import reduce
    from .kernel import lcm_poly
    L = reduce(lcm_poly, dens, QQxy.one)
    cols = []
    for im in images:
        n, dd = num_den(im)
        cols.append(n * L.exquo(dd))
    rows = {}
    for j, p in enumerate(cols):
        for e, c in coeffs_in(p, 1).items():
            rows.setdefault(e, {})[j] = as_frac(c)
    if not rows:
        basis = [[_K.one if i == j else _K.zero for i in range(d + 1)] for j in range(d + 1)]
    else:
        keys = sorted(rows)
        M = DomainMatrix({i: rows[k] for i, k in enumerate(keys)}, (len(keys), d + 1), _KD)
        basis = [list(v) for v in M.nullspace().to_dense().rep.to_ddm()]
    out = []
    for vec in basis:
        P = sum((c * Y ** j for j, c in enumerate(vec) if c != 0), _K.zero)
        if P != 0:
            out.append(P)
    return out


def kovacic_case1(r, trace=None):
    """Rational ``u`` in Q(x)(y) with ``u' + u^2 = r`` (y-derivative)."""
    r = as_frac(r)
    _, d = num_den(r)
    poles = [(f, m) for f, m in factor(d) if degree_in(f, 1) > 0] if not d.is_ground else []
    try:
        local = [_pole_options(r, f, m) for f, m in poles]
        inf = _infinity_options(r)
    except Unsupported as exc:
        if trace is not None:
            trace.append(("kovacic", "unsupported", {"reason": str(exc)}))
        return []
    if any(not o for o in local) or not inf:
        return []
    out = []
    for sinf, ainf in inf:
        for choice in product(*local) if local else [()]:
            dval = ainf
            omega = sinf
            for (f, _), (part, alpha) in zip(poles, choice):
                dval -= alpha * degree_in(f, 1)
                omega += part + alpha * as_frac(dy(f)) / as_frac(f)
            if not is_constant(dval):
                continue
            dq = QQ.convert(dval.numer.LC if dval.numer else 0) / dval.denom.LC if dval != 0 else QQ(0)
            if dq.denominator != 1 or dq < 0:
                continue
            for P in _poly_solutions(omega, r, int(dq)):
                u = omega + dy(P) / P
                if dy(u) + u ** 2 == r and u not in out:
                    out.append(u)
    return out
