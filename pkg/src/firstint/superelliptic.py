"""Superelliptic curves ``w^k = S(x)`` and divisors on hyperelliptic ones.

Divisors are handled on curves ``w^2 = C(x)`` with ``C`` squarefree over Q.
A finite place is a pair ``(u, v)``: ``u`` irreducible, ``v`` a residue mod
``u`` with ``v^2 = C mod u``.  It stands for the points ``(theta, v(theta))``
over the roots of ``u``; ``v = 0`` marks a branch place.  At infinity there is
one ramified place when ``deg C`` is odd and two places ``inf+``/``inf-``
(``w ~ +-s x^(n/2)``, ``s > 0``) when ``deg C`` is even and the leading
coefficient of ``C`` is a rational square.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Optional

from sympy import QQ
from sympy.polys.rings import ring

from .ansatz import nullspace_of_images
from .kernel import rational_roots

QQx, X = ring("x", QQ)

INF = "inf"


class CurveError(ValueError):
    pass


def as_univariate(S):
    """Coerce a polynomial in x (any of the package rings) or a string to ``QQ[x]``."""
    if isinstance(S, str):
        from .kernel import parse_poly
        S = parse_poly(S)
    if hasattr(S, "ring") and S.ring == QQx:
        return S
    if hasattr(S, "ring"):
        d = {}
        for m, c in S.iterterms():
            if any(m[1:]):
                raise CurveError("radicand depends on more than x")
            d[(m[0],)] = c
        return QQx.from_dict(d) if d else QQx.zero
    return QQx(QQ.convert(S))


# ---------------------------------------------------------------------------
# genus and the genus <= 1 table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuperellipticCurve:
    """``w^k = lc * prod f_i^m_i`` with irreducible ``f_i`` and ``0 < m_i < k``."""

    k: int
    factors: tuple
    lc: object = QQ.one

    @classmethod
    def from_poly(cls, k, S):
        S = as_univariate(S)
        if S.is_zero:
            raise CurveError("S = 0")
        c, facs = S.factor_list()
        out = []
        for f, m in facs:
            m %= k
            if m:
                out.append((f.monic(), m))
        # the scalar carries the leading coefficients of the dropped factors
        return cls(k, tuple(out), QQ.convert(S.LC))

    @property
    def S(self):
        acc = QQx(self.lc)
        for f, m in self.factors:
            acc *= f ** m
        return acc

    def branch_multiplicities(self):
        """Multiplicity mod k of every branch point over the algebraic closure."""
        out = []
        total = 0
        for f, m in self.factors:
            out += [m] * f.degree()
            total += m * f.degree()
        if total % self.k:
            out.append(self.k - total % self.k)
        return out

    def is_irreducible(self):
        g = self.k
        for m in self.branch_multiplicities():
            g = gcd(g, m)
        return g == 1


def genus(curve):
    """``g = (k (#B - 2) - sum gcd(k, m_z)) / 2 + 1`` over branch points incl. infinity."""
    if not curve.is_irreducible():
        raise CurveError("reducible curve")
    ms = curve.branch_multiplicities()
    s = sum(gcd(curve.k, m) for m in ms)
    twice = curve.k * (len(ms) - 2) - s + 2
    assert twice % 2 == 0 and twice >= 0
    return twice // 2


# (k, branch multiplicities mod k up to permutation) of each genus-1 normal form
GENUS1_TABLE = {
    "y^2=x(x-1)(x-a)": (2, (1, 1, 1, 1)),
    "y^3=x(x-1)": (3, (1, 1, 1)),
    "y^3=x^2(x-1)^2": (3, (2, 2, 2)),
    "y^4=x^2(x-1)": (4, (1, 1, 2)),
    "y^4=x^2(x-1)^3": (4, (2, 3, 3)),
    "y^6=x^3(x-1)^2": (6, (1, 2, 3)),
    "y^6=x^3(x-1)^4": (6, (3, 4, 5)),
}
GENUS0_TAG = "y^k=x^l"


def genus1_classification(curve):
    """Tag of the normal form the curve is Moebius-equivalent to, or None.

    Genus-0 curves have two branch points and are equivalent to ``y^k = x^l``.
    """
    if not curve.is_irreducible():
        return None
    g = genus(curve)
    if g == 0:
        return GENUS0_TAG
    if g > 1:
        return None
    key = (curve.k, tuple(sorted(curve.branch_multiplicities())))
    for tag, val in GENUS1_TABLE.items():
        if val == key:
            return tag
    return None


# ---------------------------------------------------------------------------
# univariate helpers
# ---------------------------------------------------------------------------

def inv_mod(a, m):
    s, _, h = a.gcdex(m)
    if h.degree() != 0:
        raise CurveError("not invertible")
    return (s * QQ.one / h.LC).rem(m)


def valuation(p, u):
    if p.is_zero:
        return 10 ** 9
    v = 0
    while True:
        q, r = p.div(u)
        if not r.is_zero:
            return v
        p, v = q, v + 1


_HENSEL_CACHE = {}


def hensel_sqrt(v, C, u, t):
    """``V = v mod u`` with ``V^2 = C mod u^t`` (``v`` invertible mod ``u``)."""
    key = (tuple(v.to_dense()), tuple(C.to_dense()), tuple(u.to_dense()), t)
    if key not in _HENSEL_CACHE:
        if len(_HENSEL_CACHE) > 4096:
            _HENSEL_CACHE.clear()
        _HENSEL_CACHE[key] = _hensel_sqrt(v, C, u, t)
    return _HENSEL_CACHE[key]


def _hensel_sqrt(v, C, u, t):
    mod = u
    V = v.rem(u)
    e = 1
    while e < t:
        e = min(2 * e, t)
        mod = u ** e
        V = (V - (V * V - C) * inv_mod(2 * V, mod)).rem(mod)
    return V.rem(u ** t)


def _sqrt_rational(c):
    c = QQ.convert(c)
    if c < 0:
        return None
    from math import isqrt
    n, d = int(c.numerator), int(c.denominator)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return QQ(rn, rd)
    return None


def _infinity_series(C, prec):
    """``phi`` with ``C = lc x^n phi(1/x)^2``, as coefficients of ``1/x^j``."""
    n = C.degree()
    lc = C.LC
    c = [QQ.convert(C.coeff(X ** (n - j)) if n - j >= 0 else 0) / lc for j in range(prec)]
    out = [QQ.one]
    for j in range(1, prec):
        acc = c[j]
        for i in range(1, j):
            acc -= out[i] * out[j - i]
        out.append(acc / 2)
    return out


def _laurent_times_series(U, m, phi, top_drop):
    """Coefficient list of ``U(x) * x^m * phi(1/x)`` for exponents > top_drop (descending)."""
    res = {}
    for (i,), c in U.iterterms():
        for j, p in enumerate(phi):
            e = i + m - j
            if e <= top_drop:
                break
            res[e] = res.get(e, QQ.zero) + c * p
    return res


# ---------------------------------------------------------------------------
# hyperelliptic divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperDivisor:
    """Formal sum of places on ``w^2 = C(x)``.

    ``support`` holds ``(u, v, mult)`` with ``u`` monic irreducible; for the
    places at infinity ``u`` is ``"inf"`` and ``v`` is ``+1``/``-1`` (split)
    or ``0`` (ramified).  ``d2`` is the square of the residue scale.
    """

    C: object
    support: tuple
    d2: object = QQ.one

    @classmethod
    def make(cls, C, entries, d2=QQ.one):
        C = as_univariate(C)
        acc = Counter()
        for u, v, m in entries:
            if m == 0:
                continue
            if u == INF:
                acc[(INF, int(v))] += m
                continue
            u = as_univariate(u)
            v = as_univariate(v) if v is not None else None
            for f, e in factor_univariate(u):
                if v is None:
                    # the whole fibre over f
                    for piece in _fibre_places(C, f):
                        acc[piece] += m * e
                    continue
                vv = v.rem(f)
                if not ((vv * vv - C).rem(f)).is_zero:
                    raise CurveError("point not on the curve")
                acc[(f, vv)] += m * e
        sup = tuple((u, v, m) for (u, v), m in sorted(acc.items(), key=_place_key) if m)
        return cls(C, sup, QQ.convert(d2))

    def degree(self):
        tot = 0
        for u, v, m in self.support:
            tot += m * (_inf_degree(self.C, v) if u == INF else u.degree())
        return tot

    def scale(self, N):
        return HyperDivisor(self.C, tuple((u, v, m * N) for u, v, m in self.support), self.d2)

    def __add__(self, other):
        if self.C != other.C:
            raise CurveError("different curves")
        return HyperDivisor.make(self.C, list(self.support) + list(other.support), self.d2)

    def __neg__(self):
        return self.scale(-1)

    def sheets(self):
        """``(u, sheet, mult)`` with sheet +1/-1 relative to the canonical branch, 0 at branch places."""
        out = []
        for u, v, m in self.support:
            if u == INF:
                out.append((u, int(v), m))
            elif v.is_zero:
                out.append((u, 0, m))
            else:
                out.append((u, 1 if v.LC > 0 else -1, m))
        return out

    def is_zero(self):
        return not self.support


def _place_key(item):
    (u, v), _ = item
    if u == INF:
        return (1, (), v)
    return (0, (u.degree(), tuple(u.to_dense())), tuple(v.to_dense()) if v else ())


def _inf_degree(C, v):
    return 1 if (v != 0 or C.degree() % 2) else 2


def factor_univariate(u):
    if u.is_ground:
        return []
    _, facs = u.factor_list()
    return [(f.monic(), e) for f, e in facs]


def _fibre_places(C, f):
    """Places over the roots of the irreducible ``f``."""
    r = C.rem(f)
    if r.is_zero:
        return [(f, QQx.zero)]
    v = _sqrt_mod_irreducible(r, f)
    if v is None:
        raise CurveError("fibre does not split over Q; pass both sheets explicitly")
    return [(f, v), (f, (-v).rem(f))]


def _sqrt_mod_irreducible(r, f):
    if f.degree() == 1:
        root = -f.coeff(X ** 0)
        s = _sqrt_rational(r.evaluate(X, root) if hasattr(r, "evaluate") else r)
        return None if s is None else QQx(s)
    # y^2 - r over Q[x]/f: factor via sympy over the field generated by a root of f
    return None


def infinity_places(C):
    """List of ``(v, degree)`` for the places at infinity of ``w^2 = C``."""
    n = C.degree()
    if n % 2:
        return [(0, 1)]
    if _sqrt_rational(C.LC) is not None:
        return [(1, 1), (-1, 1)]
    return [(0, 2)]


# ---------------------------------------------------------------------------
# functions with prescribed divisor
# ---------------------------------------------------------------------------

@dataclass
class DivisorFunction:
    """``H = (U1 + U2 w)/W`` on ``w^2 = C``."""

    U1: object
    U2: object
    W: object

    @property
    def H1(self):
        return self.U1, self.W

    @property
    def H2(self):
        return self.U2, self.W


def _grouped(div):
    """Per finite ``u``: {"+": m, "-": m} by canonical sheet, or {"0": m}; and infinity dict."""
    fin = {}
    inf = {}
    for u, v, m in div.support:
        if u == INF:
            inf[int(v)] = inf.get(int(v), 0) + m
            continue
        key = tuple(u.to_dense())
        ent = fin.setdefault(key, {"u": u, "v": None, "p": 0, "m": 0, "b": 0})
        if v.is_zero:
            ent["b"] += m
            continue
        canon = v if v.LC > 0 else (-v).rem(u)
        ent["v"] = canon
        if v == canon:
            ent["p"] += m
        else:
            ent["m"] += m
    return fin, inf


def function_with_divisor(div, N=1, extra_degree=0):
    """``H`` with ``div(H) = N * div`` exactly, or None.

    Unknown numerators ``U1, U2`` sit over ``W`` built from the negative part
    of ``N * div``; order conditions at the support and at infinity are
    linear.  A nonzero solution of ``div(H) >= N div`` with ``deg(N div) = 0``
    has exactly that divisor; it is re-verified by valuations.
    """
    C = div.C
    n = C.degree()
    T = div.scale(N)
    if T.degree() != 0:
        return None
    fin, inf = _grouped(T)
    W = QQx.one
    conds = []  # (kind, data)
    for ent in fin.values():
        u = ent["u"]
        if ent["v"] is None:
            e = (-ent["b"] + 1) // 2 if ent["b"] < 0 else 0
            W *= u ** e
            t0 = ent["b"] + 2 * e
            conds.append(("branch", u, t0))
        else:
            e = max(0, -ent["p"], -ent["m"])
            W *= u ** e
            conds.append(("sheet", u, ent["v"], ent["p"] + e))
            conds.append(("sheet", u, (-ent["v"]).rem(u), ent["m"] + e))
    dW = W.degree()
    if n % 2:
        Tinf = inf.get(0, 0)
        a = (2 * dW - Tinf) // 2
        b = (2 * dW - Tinf - n) // 2
        inf_conds = []
    else:
        m2 = n // 2
        s = _sqrt_rational(C.LC)
        if s is None:
            Tp = Tm = inf.get(0, 0)
            if inf.get(1) or inf.get(-1):
                raise CurveError("split infinity on a curve with conjugate points at infinity")
        else:
            Tp, Tm = inf.get(1, 0), inf.get(-1, 0)
        topp, topm = dW - Tp, dW - Tm
        a = max(topp, topm) + extra_degree
        b = max(topp, topm) - m2 + extra_degree
        inf_conds = [(s, topp, topm, m2)]
    if a < 0 and b < 0:
        return None
    na, nb = max(a + 1, 0), max(b + 1, 0)
    basis = [("1", i) for i in range(na)] + [("2", i) for i in range(nb)]
    precision = a + b + n + 4

    def image(kind, i):
        U1 = X ** i if kind == "1" else QQx.zero
        U2 = X ** i if kind == "2" else QQx.zero
        return _conditions(U1, U2, C, conds, inf_conds, precision)

    images = [image(kind, i) for kind, i in basis]
    ker = nullspace_of_images(images)
    if not ker:
        return None
    vec = ker[0]
    U1 = sum((c * X ** i for (kind, i), c in zip(basis, vec) if kind == "1" and c), QQx.zero)
    U2 = sum((c * X ** i for (kind, i), c in zip(basis, vec) if kind == "2" and c), QQx.zero)
    h = DivisorFunction(U1, U2, W)
    if not divisor_matches(h, T):
        raise AssertionError("constructed function has the wrong divisor")
    return h


_CND, *_cnd_gens = ring("x,t", QQ)


def _conditions(U1, U2, C, conds, inf_conds, prec):
    """Stack every linear condition into one polynomial (tagged by t^k)."""
    rows = {}
    tag = 0

    def put(poly_or_dict):
        nonlocal tag
        items = poly_or_dict.items() if isinstance(poly_or_dict, dict) else \
            ((m[0], c) for m, c in poly_or_dict.iterterms())
        for e, c in items:
            if c:
                rows[(e, tag)] = rows.get((e, tag), QQ.zero) + c
        tag += 1

    for cd in conds:
        if cd[0] == "branch":
            _, u, t0 = cd
            put(U1.rem(u ** ((t0 + 1) // 2)) if t0 > 0 else QQx.zero)
            put(U2.rem(u ** (t0 // 2)) if t0 > 1 else QQx.zero)
        else:
            _, u, v, t = cd
            if t <= 0:
                put(QQx.zero)
                continue
            V = hensel_sqrt(v, C, u, t)
            put((U1 + U2 * V).rem(u ** t))
    for s, topp, topm, m2 in inf_conds:
        phi = _infinity_series(C, prec)
        if s is None:
            hi = {e: c for (e,), c in U1.iterterms() if e > topp}
            put(hi)
            put(_laurent_times_series(U2, m2, phi, topp))
        else:
            ser = _laurent_times_series(U2, m2, phi, min(topp, topm))
            u1 = dict(((e,), c) for (e,), c in U1.iterterms())
            for sign, top in ((1, topp), (-1, topm)):
                cond = {}
                for (e,), c in u1.items():
                    if e > top:
                        cond[e] = cond.get(e, QQ.zero) + c
                for e, c in ser.items():
                    if e > top:
                        cond[e] = cond.get(e, QQ.zero) + sign * s * c
                put(cond)
    return _CND.from_dict({(e, t): c for (e, t), c in rows.items() if c}) if rows else _CND.zero


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------

def _order_numerator(U1, U2, C, u, v):
    """Order of ``U1 + U2 w`` at the place ``(u, v)``."""
    if v.is_zero:
        return min(2 * valuation(U1, u), 2 * valuation(U2, u) + 1)
    t = 1
    while True:
        V = hensel_sqrt(v, C, u, t)
        if not ((U1 + U2 * V).rem(u ** t)).is_zero:
            return t - 1
        t += 1
        if t > U1.degree() + U2.degree() + C.degree() + 4:
            raise AssertionError("unbounded order")


def place_order(h, C, u, v):
    if u == INF:
        return _infinity_order(h, C, v)
    w = valuation(h.W, u)
    return _order_numerator(h.U1, h.U2, C, u, v) - (2 * w if v.is_zero else w)


def _infinity_order(h, C, v):
    n = C.degree()
    dW = h.W.degree()
    d1 = h.U1.degree() if not h.U1.is_zero else None
    d2 = h.U2.degree() if not h.U2.is_zero else None
    if n % 2:
        cands = [2 * d1] if d1 is not None else []
        if d2 is not None:
            cands.append(2 * d2 + n)
        return -max(cands) + 2 * dW
    m2 = n // 2
    phi = _infinity_series(C, (d1 or 0) + (d2 or 0) + n + 8)
    ser = _laurent_times_series(h.U2, m2, phi, -n - 8) if d2 is not None else {}
    s = _sqrt_rational(C.LC)
    part1 = {e: c for (e,), c in h.U1.iterterms()}
    if s is None:
        # conjugate points: rational and irrational parts vanish separately
        tops = [e for e, c in part1.items() if c] + [e for e, c in ser.items() if c]
    else:
        tot = dict(part1)
        for e, c in ser.items():
            tot[e] = tot.get(e, QQ.zero) + int(v) * s * c
        tops = [e for e, c in tot.items() if c]
    return -max(tops) + dW


def divisor_matches(h, T):
    """True iff ``div(h) = T`` (valuations at the support and at infinity, and the norm)."""
    C = T.C
    for u, v, m in T.support:
        if place_order(h, C, u, v) != m:
            return False
    sup_inf = {int(v): m for u, v, m in T.support if u == INF}
    for v, _ in infinity_places(C):
        if place_order(h, C, INF, v) != sup_inf.get(v, 0):
            return False
    # no zeros or poles away from the support: the norm lives on support fibres
    norm = h.U1 * h.U1 - h.U2 * h.U2 * C
    if norm.is_zero:
        return False
    rest = norm
    for u, v, m in T.support:
        if u == INF:
            continue
        while True:
            q, r = rest.div(u)
            if not r.is_zero:
                break
            rest = q
    Wrest = h.W
    for u, v, m in T.support:
        if u == INF:
            continue
        while True:
            q, r = Wrest.div(u)
            if not r.is_zero:
                break
            Wrest = q
    return rest.degree() == 0 and Wrest.degree() == 0


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------

class TorsionOracle:
    """``order(div)``: smallest ``N`` with ``N div`` principal, 0 if none found."""

    def order(self, div):
        raise NotImplementedError


@dataclass
class BuiltinTorsionOracle(TorsionOracle):
    cap: int = 60
    last_witness: Optional[DivisorFunction] = None
    cap_limited: bool = False

    def order(self, div):
        N, h, limited = torsion_search(div, self.cap)
        self.last_witness, self.cap_limited = h, limited
        return N


def torsion_search(div, cap=60):
    """``(N, witness, cap_limited)`` by incremental brute force."""
    if div.degree() != 0:
        raise CurveError("divisor of nonzero degree")
    if div.is_zero():
        return 1, DivisorFunction(QQx.one, QQx.zero, QQx.one), False
    for N in range(1, cap + 1):
        h = function_with_divisor(div, N)
        if h is not None:
            return N, h, False
    return 0, None, True


def torsion_order_default(div, curve=None, cap=60, trace=None):
    N, _, limited = torsion_search(div, cap)
    if trace is not None and limited:
        trace.append(("torsion", "cap-limited", {"cap": cap}))
    return N


# ---------------------------------------------------------------------------
# residue divisors of restricted forms
# ---------------------------------------------------------------------------

def residue_scale(values):
    """``(d2, n_i)`` with ``values[i] = n_i^2 d2`` for squared residues, or None.

    ``values`` are the nonzero rational roots ``lambda^2`` of the residue
    polynomial; the residues are then ``+-n_i sqrt(d2)`` with integers ``n_i``.
    """
    vals = [QQ.convert(v) for v in values if v != 0]
    if not vals:
        return None
    from sympy import factorint
    base = vals[0]
    # squarefree kernel of the first value fixes the square class
    num, den = int(abs(base.numerator)), int(base.denominator)
    core = 1
    for p, e in factorint(num * den).items():
        if e % 2:
            core *= p
    core = -core if base < 0 else core
    qs = []
    for v in vals:
        q2 = v / core
        q = _sqrt_rational(q2)
        if q is None:
            return None
        qs.append(q)
    from math import lcm
    g_num = 0
    g_den = 1
    for q in qs:
        g_num = gcd(g_num, int(q.numerator))
        g_den = lcm(g_den, int(q.denominator))
    g = QQ(g_num, g_den)
    d2 = QQ(core) * g * g
    ns = [int(q / g) for q in qs]
    return d2, ns


def residue_divisor(P, Q, S, d2):
    """Divisor ``sum (1/d) res_x`` of ``P/(Q sqrt(S))`` on ``w0^2 = S/d2``.

    ``P, Q, S`` are univariate over Q; ``Q`` squarefree and coprime with
    ``S``; ``S`` squarefree.  Scaling ``w = d w0`` puts the residue points
    over Q: the point over a root of ``Q`` with residue ``n d`` has
    ``w0 = P/(Q' n d2)``.
    """
    P, Q, S = (as_univariate(p) for p in (P, Q, S))
    d2 = QQ.convert(d2)
    C = S.quo_ground(d2)
    entries = []
    Qd = Q.diff(X)
    done = QQx.one
    if Q.degree() > 0:
        for f, _ in factor_univariate(Q):
            # residue^2 at the roots of f
            num = (P * P).rem(f)
            den = (Qd * Qd * S).rem(f)
            ratio = (num * inv_mod(den, f)).rem(f)
            if ratio.degree() > 0:
                raise CurveError("residue obstruction")
            mu = QQ.convert(ratio.LC) if not ratio.is_zero else QQ.zero
            if mu == 0:
                continue
            n2 = mu / d2
            n = _sqrt_rational(n2)
            if n is None or n.denominator != 1:
                raise CurveError("residue obstruction")
            v = (P * inv_mod((Qd * int(n) * d2).rem(f), f)).rem(f)
            entries.append((f, v, int(n)))
            entries.append((f, (-v).rem(f), -int(n)))
            done *= f
    # residues at infinity
    for sgn, _ in infinity_places(C):
        if sgn == 0:
            continue
        s = _sqrt_rational(C.LC)
        m2 = C.degree() // 2
        c = _coefficient_at_infinity(P, Q, C, m2)
        # G dx ~ sgn * c / (d2 * s) * dx/x and res_inf = -coefficient of 1/x
        r_over_d = -sgn * c / (d2 * s)
        if r_over_d != 0:
            if QQ.convert(r_over_d).denominator != 1:
                raise CurveError("residue obstruction")
            entries.append((INF, sgn, int(r_over_d)))
    return HyperDivisor.make(C, entries, d2)


def _coefficient_at_infinity(P, Q, C, m2):
    """Coefficient of ``1/x`` in ``P/(Q x^m2 phi(1/x))``."""
    # P/Q = sum a_j x^-j starting at x^(degP - degQ)
    e = P.degree() - Q.degree() - m2
    if e < -1:
        return QQ.zero
    prec = e + 2
    phi = _infinity_series(C, prec + 1)
    # series of P/Q in 1/x
    pc = [QQ.convert(P.coeff(X ** (P.degree() - j))) if P.degree() - j >= 0 else QQ.zero
          for j in range(prec + 1)]
    qc = [QQ.convert(Q.coeff(X ** (Q.degree() - j))) if Q.degree() - j >= 0 else QQ.zero
          for j in range(prec + 1)]
    ratio = []
    for j in range(prec + 1):
        acc = pc[j]
        for i in range(1, j + 1):
            acc -= qc[i] * ratio[j - i]
        ratio.append(acc / qc[0])
    inv_phi = []
    for j in range(prec + 1):
        acc = QQ.one if j == 0 else QQ.zero
        for i in range(1, j + 1):
            acc -= phi[i] * inv_phi[j - i]
        inv_phi.append(acc)
    prod = [sum((ratio[i] * inv_phi[j - i] for i in range(j + 1)), QQ.zero) for j in range(prec + 1)]
    # exponent of x for prod[j] is e - j; we need e - j = -1
    j = e + 1
    return prod[j] if 0 <= j < len(prod) else QQ.zero


# ---------------------------------------------------------------------------
# Moebius transformations
# ---------------------------------------------------------------------------

def _compose(p, a, b, c, e, deg):
    """``(c x + e)^deg p((a x + b)/(c x + e))`` as a polynomial."""
    num = a * X + b
    den = c * X + e
    acc = QQx.zero
    for (i,), co in p.iterterms():
        acc += co * num ** i * den ** (deg - i)
    return acc


def moebius_transform(div, a, b, c, e):
    """Transport ``div`` along ``x_old = (a x + b)/(c x + e)``.

    The new curve is ``w'^2 = (c x + e)^(2m) C(x_old)`` with ``2m`` the even
    number among ``deg C, deg C + 1`` and ``w' = (c x + e)^m w``.
    """
    a, b, c, e = (QQ.convert(t) for t in (a, b, c, e))
    if a * e - b * c == 0:
        raise CurveError("degenerate Moebius map")
    C = div.C
    n = C.degree()
    m = (n + 1) // 2
    Cn = _compose(C, a, b, c, e, 2 * m)
    lin = c * X + e
    entries = []
    for u, v, mult in div.support:
        if u == INF:
            entries += _transport_infinity(C, v, mult, a, b, c, e, m)
            continue
        if c != 0 and u.degree() == 1 and -u.coeff(X ** 0) == a / c:
            # this fibre goes to the new infinity
            entries += _to_infinity(Cn, v, mult, a, b, c, e, m)
            continue
        un = _compose(u, a, b, c, e, u.degree()).monic()
        # numerator of v(x_old) over lin^(deg v) then times lin^m
        dv = max(v.degree(), 0)
        vnum = _compose(v, a, b, c, e, dv) if not v.is_zero else QQx.zero
        if dv <= m:
            vn = (vnum * lin ** (m - dv)).rem(un)
        else:
            vn = (vnum * inv_mod((lin ** (dv - m)).rem(un), un)).rem(un)
        entries.append((un, vn, mult))
    return HyperDivisor.make(Cn, entries, div.d2), Cn


def _transport_infinity(C, v, mult, a, b, c, e, m):
    n = C.degree()
    if c == 0:
        # infinity stays at infinity
        if n % 2:
            return [(INF, 0, mult)]
        s_old = _sqrt_rational(C.LC)
        if v == 0:
            return [(INF, 0, mult)]
        val = int(v) * s_old * e ** m * (a / e) ** m
        return [(INF, 1 if val > 0 else -1, mult)]
    pt = QQx(X + e / c)
    if n % 2:
        return [(pt, QQx.zero, mult)]
    if v == 0:
        return [(pt, None, mult)]
    s = _sqrt_rational(C.LC)
    val = int(v) * s * ((b * c - a * e) / c) ** (n // 2)
    return [(pt, QQx(val), mult)]


def _to_infinity(Cn, v, mult, a, b, c, e, m):
    if Cn.degree() % 2:
        return [(INF, 0, mult)]
    if v.is_zero:
        return [(INF, 0, mult)]
    val = c ** m * QQ.convert(v.LC if v.degree() == 0 else v.coeff(X ** 0))
    return [(INF, 1 if val > 0 else -1, mult)]


def moebius_normalize(div, alpha=None):
    """Make the radicand of odd degree with ``x -> 1/x + alpha``, ``alpha`` a root of ``C``.

    Returns ``(divisor, C')``; odd-degree input is returned unchanged.
    """
    C = div.C
    if C.degree() % 2:
        return div, C
    if alpha is None:
        roots, _ = rational_roots(C)
        if not roots:
            raise CurveError("radicand has no rational root")
        alpha = roots[0][0]
    alpha = QQ.convert(alpha)
    if C.evaluate(X, alpha) != 0:
        raise CurveError("alpha is not a root")
    return moebius_transform(div, alpha, 1, 1, 0)
