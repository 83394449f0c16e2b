"""Closed radical 1-forms ``(P1 dx + P2 dy) / (Q S^(1/k))``.

Radical functions are kept at the k-th power level so that all arithmetic
stays in Q(x, y): a function ``U / (V S^(1/k))`` is stored as the triple
``(U, V, S)`` together with ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm

from sympy import QQ, factorint
from sympy.polys.rings import ring

from .kernel import (
    QQxy, QQxy_field, as_frac, degree, degree_in, dx, dy, gcd_bivariate, is_constant, num_den,
    primitive_normal, rational_roots, resultant, squarefree_part,
)
from .ansatz import nullspace_of_images, mon
from .kernel import monomials_upto

# polynomials along a line: x and the slope z
QQxz, lx, lz = ring("x,z", QQ)
# x, z and the residue variable
QQxzl, _lx3, _lz3, _ll3 = ring("x,z,l", QQ)
# x, y, residue variable for the Liouvillian residue resultant
QQxyl, _X3, _Y3, _L3 = ring("x,y,l", QQ)


class FormError(ValueError):
    pass


# ---------------------------------------------------------------------------
# radical normal form
# ---------------------------------------------------------------------------

def _kth_root_split(c, k):
    """``c = r**k * s`` with ``s`` a k-th-power-free rational; returns (r, s)."""
    c = QQ.convert(c)
    parts = []
    for val in (int(abs(c.numerator)), int(c.denominator)):
        rr, rs = 1, 1
        for pr, e in factorint(val).items():
            rr *= pr ** (e // k)
            rs *= pr ** (e % k)
        parts.append((rr, rs))
    r = QQ(parts[0][0], parts[1][0])
    s = QQ(parts[0][1], parts[1][1])
    if c < 0:
        if k % 2:
            r = -r
        else:
            s = -s
    return r, s


def radical_normal_form(Fk, k):
    """Write ``Fk = P**k / (Q**k * S)`` with every root multiplicity of ``S`` < k.

    Returns polynomials ``(P, Q, S)`` in the ring of ``Fk``; ``Q`` and ``S``
    are primitive with positive leading coefficient up to the scalar carried
    by ``S``.
    """
    f = Fk if not isinstance(Fk, type(QQxy.one)) else as_frac(Fk)
    R = f.numer.ring
    if f == 0:
        raise FormError("Fk = 0")
    n, d = f.numer, f.denom
    cn, n = primitive_normal(n)
    cd, d = primitive_normal(d)
    P, Q, S = R.one, R.one, R.one
    for poly, sgn in ((n, 1), (d, -1)):
        if poly.is_ground:
            continue
        _, facs = poly.sqf_list()
        for g, m in facs:
            g = primitive_normal(g)[1]
            e = sgn * m
            q = -((-e) // k)  # ceil(e/k)
            s = q * k - e
            if q > 0:
                P *= g ** q
            elif q < 0:
                Q *= g ** (-q)
            if s:
                S *= g ** s
    c = QQ.convert(cn / cd)
    r, s = _kth_root_split(c, k)
    # c = r^k a/b = (r t/b)^k / t^(k-1) with the integer t = a b^(k-1)
    t = QQ(s.numerator * s.denominator ** (k - 1))
    P = P * (r * t / s.denominator)
    S = S * t ** (k - 1)
    assert R.to_field()(P ** k) / R.to_field()(Q ** k * S) == f
    return P, Q, S


@dataclass(frozen=True)
class OneForm:
    """``(P1 dx + P2 dy) / (Q S^(1/k))``."""

    P1: object
    P2: object
    Q: object
    S: object
    k: int

    @property
    def coefficient_fracs(self):
        Qf = as_frac(self.Q)
        return as_frac(self.P1) / Qf, as_frac(self.P2) / Qf

    def closedness_residual(self):
        """``d/dy(P1/Q) - P1 S_y/(k Q S) - (d/dx(P2/Q) - P2 S_x/(k Q S))``."""
        a, b = self.coefficient_fracs
        S = as_frac(self.S)
        k = self.k
        return (dy(a) - a * dy(S) / (k * S)) - (dx(b) - b * dx(S) / (k * S))

    def is_closed(self):
        return self.closedness_residual() == 0

    def is_reduced(self):
        return reduced_violations(self) == []


def normalize_form(P1, P2, Q, S, k):
    g = gcd_bivariate(gcd_bivariate(P1, P2), Q)
    if not g.is_ground:
        P1, P2, Q = P1.exquo(g), P2.exquo(g), Q.exquo(g)
    c, Qn = primitive_normal(Q)
    return OneForm(P1.quo_ground(c), P2.quo_ground(c), Qn, S, k)


def make_oneform(X, Fk, k):
    """The form ``-(B/A) F dx + F dy`` for ``F**k = Fk``."""
    Fk = as_frac(Fk)
    if Fk == 0:
        raise FormError("Fk = 0")
    if X.A.is_zero:
        raise FormError("A = 0")
    PF, QF, S = radical_normal_form(Fk, k)
    return normalize_form(-X.B * PF, X.A * PF, X.A * QF, S, k)


def reduced_violations(w):
    """Reasons (possibly none) why ``w`` fails the reduced-form definition."""
    if w.P1.is_zero and w.P2.is_zero:
        return []
    out = []
    Q, S = w.Q, w.S
    if not Q.is_ground and degree(squarefree_part(Q)) != degree(Q):
        out.append("multiple pole")
    if not gcd_bivariate(Q, S).is_ground:
        out.append("pole on S")
    lhs = max(degree(w.P1), degree(w.P2))
    if Fraction(lhs) > Fraction(degree(Q)) + Fraction(degree(S), w.k) - 1:
        out.append("pole at infinity")
    return out


# ---------------------------------------------------------------------------
# restriction to lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineRestriction:
    """``G(x) = P/(Q S^(1/k))`` along ``y = z (x - x0) + y0``.

    ``P, Q, S`` live in ``QQ[x, z]``; for a numeric slope they do not depend
    on ``z``.
    """

    x0: object
    y0: object
    z: object
    P: object
    Q: object
    S: object
    k: int

    def as_frac(self):
        return self.P, self.Q, self.S


def _line_substitute(p, x0, y0, z):
    """``p(x, z (x - x0) + y0)`` as an element of ``QQ[x, z]``."""
    zz = lz if z is None else QQxz(QQ.convert(z))
    yy = zz * (lx - QQxz(QQ.convert(x0))) + QQxz(QQ.convert(y0))
    acc = QQxz.zero
    cache = {0: QQxz.one}
    for (i, j), c in p.iterterms():
        if j not in cache:
            cache[j] = yy ** j
        acc += QQxz(c) * lx ** i * cache[j]
    return acc


def is_regular_point(w, x0, y0):
    ev = lambda p: p.evaluate([(p.ring.gens[0], QQ.convert(x0)), (p.ring.gens[1], QQ.convert(y0))])
    if ev(w.Q) == 0 or ev(w.S) == 0:
        return False
    return not (ev(w.P1) == 0 and ev(w.P2) == 0)


def restrict_to_line(w, x0, y0, z=None):
    """Pull back ``w`` along ``y = z (x - x0) + y0``; ``z=None`` keeps it symbolic."""
    if not is_regular_point(w, x0, y0):
        raise FormError("base point on singular locus")
    P = _line_substitute(w.P1, x0, y0, z) + (lz if z is None else QQxz(QQ.convert(z))) * \
        _line_substitute(w.P2, x0, y0, z)
    Q = _line_substitute(w.Q, x0, y0, z)
    S = _line_substitute(w.S, x0, y0, z)
    if P.is_zero:
        return LineRestriction(x0, y0, z, P, QQxz.one, QQxz.one, w.k)
    F = QQxz.to_field()
    Gk = F(P ** w.k) / F(Q ** w.k * S)
    Pn, Qn, Sn = radical_normal_form(Gk, w.k)
    return LineRestriction(x0, y0, z, Pn, Qn, Sn, w.k)


def restrict_form_to_line(X, Fk, k, x0, y0, z=None):
    return restrict_to_line(make_oneform(X, Fk, k), x0, y0, z)


# ---------------------------------------------------------------------------
# Hermite reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadicalFunction:
    """``U / (V S^(1/k))``; stored at the k-th power level."""

    U: object
    V: object
    S: object
    k: int

    def kth_power(self):
        return as_frac(self.U) ** self.k / (as_frac(self.V) ** self.k * as_frac(self.S))

    def is_constant(self):
        return self.U.is_zero or (is_constant(as_frac(self.U) / as_frac(self.V)) and self.S.is_ground)

    def differential(self):
        """``dG = (G1 dx + G2 dy) / S^(1/k)`` with ``G1, G2`` rational."""
        g = as_frac(self.U) / as_frac(self.V)
        S = as_frac(self.S)
        k = self.k
        return dx(g) - g * dx(S) / (k * S), dy(g) - g * dy(S) / (k * S)


def subtract_differential(w, G):
    """The form ``w - dG`` in normalized ``OneForm`` shape."""
    if G.S != w.S and not (G.U.is_zero):
        raise FormError("radicands differ")
    a, b = w.coefficient_fracs
    g1, g2 = G.differential() if not G.U.is_zero else (QQxy_field.zero, QQxy_field.zero)
    t1, t2 = a - g1, b - g2
    n1, d1 = num_den(t1)
    n2, d2 = num_den(t2)
    from .kernel import lcm_poly
    L = lcm_poly(d1, d2)
    P1 = n1 * L.exquo(d1)
    P2 = n2 * L.exquo(d2)
    return normalize_form(P1, P2, L, w.S, w.k)


def hermite_bound(w):
    Qs = squarefree_part(w.Q) if not w.Q.is_ground else QQxy.one
    Qhat = w.Q.exquo(Qs) if not w.Q.is_ground else QQxy.one
    m = max(degree(w.P1), degree(w.P2))
    b = max(Fraction(m - degree(w.Q) + degree(Qhat) + 1),
            Fraction(degree(Qhat)) + Fraction(degree(w.S), w.k))
    return int(b // 1), Qhat, Qs


def hermite_reduction(w, trace=None):
    """A Hermite reduction ``G = U/(Qhat S^(1/k))`` of ``w``, or None."""
    bound, Qhat, Qs = hermite_bound(w)
    S, Q, k = w.S, w.Q, w.k
    zero = RadicalFunction(QQxy.zero, QQxy.one, S, k)
    if bound < 0:
        if trace is not None:
            trace.append(("hermite", "negative bound", {"bound": bound}))
        return zero if w.is_reduced() else None
    mod1 = S * gcd_bivariate(Q, gcd_bivariate(S * dx(Q), S * dy(Q)))
    dS = (dx(S), dy(S))
    dQhat = (dx(Qhat), dy(Qhat))
    # Qs * d(Qhat)/Qhat is a polynomial
    lg = tuple((Qs * dq) for dq in dQhat)
    lg = tuple(p.exquo(Qhat) if not Qhat.is_ground else QQxy.zero for p in lg)
    kf = QQ(1, k)
    d_inf = int((Fraction(degree(Q)) + (1 + Fraction(1, k)) * degree(S)) // 1)

    def E(U, i, with_p):
        base = (w.P1 if i == 0 else w.P2) * S if with_p else QQxy.zero
        dU = dx(U) if i == 0 else dy(U)
        return base - S * (Qs * dU - U * lg[i]) + (Qs * U * dS[i]) * kf

    def conditions(p_):
        parts = []
        for i in range(2):
            e = p_[i]
            r = e.rem(mod1) if not mod1.is_ground else QQxy.zero
            hi = QQxy.from_dict({m: c for m, c in e.iterterms() if sum(m) >= d_inf}) \
                if not e.is_zero else QQxy.zero
            parts.append((r, hi))
        return _stack(parts)

    mons = [mon(m) for m in monomials_upto(bound)]
    cols = [conditions((E(u, 0, False), E(u, 1, False))) for u in mons]
    rhs = conditions((E(QQxy.zero, 0, True), E(QQxy.zero, 1, True)))
    ker = nullspace_of_images(cols + [rhs])
    sol = None
    for vec in ker:
        if vec[-1] != 0:
            sol = [c / vec[-1] for c in vec[:-1]]
            break
    if sol is None:
        return None
    U = sum((u * c for u, c in zip(mons, sol) if c), QQxy.zero)
    G = RadicalFunction(U, Qhat, S, k)
    rest = subtract_differential(w, G)
    assert rest.is_reduced(), reduced_violations(rest)
    return G


_STK, *_stk_gens = ring("x,y,t0,t1,t2,t3", QQ)


def _stack(parts):
    acc = _STK.zero
    idx = 0
    for pair in parts:
        for p in pair:
            if not p.is_zero:
                e = [0, 0, 0, 0, 0, 0]
                e[2 + idx] = 1
                acc += _STK.from_dict({(m[0], m[1], *e[2:]): c for m, c in p.iterterms()})
            idx += 1
    return acc


# ---------------------------------------------------------------------------
# residues and logarithmic parts
# ---------------------------------------------------------------------------

def _as_xzl(p):
    """Embed a ``QQ[x, z]`` polynomial into ``QQ[x, z, l]``."""
    return QQxzl.from_dict({(m[0], m[1], 0): c for m, c in p.iterterms()}) if p else QQxzl.zero


def _univariate_data(G):
    """``(P, Q)`` in ``QQ[x, z]`` (x the integration variable) from the accepted inputs."""
    if isinstance(G, LineRestriction):
        if not G.S.is_ground:
            raise FormError("residues are computed for k = 1 only")
        return G.P.quo_ground(G.S.LC) if G.S != 1 else G.P, G.Q
    if isinstance(G, tuple):
        P, Q = G
        return _to_xz(P), _to_xz(Q)
    f = as_frac(G)
    n, d = num_den(f)
    if degree_in(n, 0) <= 0 and degree_in(d, 0) <= 0:
        # a function of y alone: integrate in y
        swap = lambda p: QQxz.from_dict({(m[1], 0): c for m, c in p.iterterms()})
        return swap(n), swap(d)
    if degree_in(n, 1) > 0 or degree_in(d, 1) > 0:
        raise FormError("expected a univariate function")
    return _to_xz(n), _to_xz(d)


def trager_residue_poly(G, check_z=True):
    """Residue polynomial ``res_x(P - l Q', Q)``, primitive and monic in ``l``.

    ``G`` is a :class:`LineRestriction` with ``k = 1``, a univariate element
    of Q(x, y), or a pair ``(P, Q)`` of ``QQ[x, z]`` polynomials.  The roots
    are the residues of ``P/Q`` at its finite poles.  Returns an element of
    ``QQ[x, z, l]``; its coefficients are checked to be free of ``z``.
    """
    P, Q = _univariate_data(G)
    if Q.is_ground or degree_in(Q, 0) <= 0:
        return QQxzl.one
    if not P.is_zero and degree_in(P, 0) >= degree_in(Q, 0):
        raise FormError("not reduced; run Hermite first")
    g = Q.gcd(Q.diff(lx))
    if degree_in(g, 0) > 0:
        raise FormError("not reduced; run Hermite first")
    Pl, Ql = _as_xzl(P), _as_xzl(Q)
    R = resultant(Pl - _ll3 * Ql.diff(_lx3), Ql, 0)
    R = _primitive_in_l(R)
    if check_z and R.degree(_lz3) > 0:
        raise FormError("residues depend on the slope")
    return R


def _to_xz(p):
    if p.ring == QQxz:
        return p
    if p.ring.ngens == 1:
        return QQxz.from_dict({(m[0], 0): c for m, c in p.iterterms()})
    return QQxz.from_dict(dict(p.iterterms()))


def _primitive_in_l(R):
    """Divide a ``QQ[x, z, l]`` polynomial by its content in ``l``."""
    cs = {}
    for m, c in R.iterterms():
        cs.setdefault(m[2], {})[(m[0], m[1], 0)] = c
    g = None
    for d in cs.values():
        p = QQxzl.from_dict(d)
        g = p if g is None else g.gcd(p)
    if g is None or g.is_zero:
        return R
    out = R.exquo(g)
    return out.monic()


def residue_poly_to_univariate(R):
    """``QQ[x, z, l]`` polynomial free of x, z to ``QQ[l]``."""
    from .kernel import QQl
    d = {}
    for m, c in R.iterterms():
        if m[0] or m[1]:
            raise FormError("residue polynomial depends on x or z")
        d[(m[2],)] = c
    return QQl.from_dict(d)


def residues_of(P, Q):
    """Rational residues and whether all residues are rational (k = 1 line data)."""
    R = residue_poly_to_univariate(trager_residue_poly((P, Q)))
    return rational_roots(R)


def liouvillian_residue_resultant(Ft, eps):
    """Residue polynomial of ``Ft`` along the lines of slope ``eps``.

    The lines ``x = x0 + eps*y`` are parametrized by ``y``; after this shear
    the polynomial is ``res_y(num - l*(den_y + eps*den_x), den)`` with its
    content in ``l`` removed.  The shear keeps poles lying on vertical lines
    visible to the y-resultant.
    """
    n, d = num_den(Ft)
    eps = QQ.convert(eps)
    N = QQxyl.from_dict({(m[0], m[1], 0): c for m, c in n.iterterms()})
    Dd = QQxyl.from_dict({(m[0], m[1], 0): c for m, c in d.iterterms()})
    lhs = N - _L3 * (Dd.diff(_Y3) + eps * Dd.diff(_X3))
    shear = _X3 + eps * _Y3
    S = resultant(lhs.compose(_X3, shear), Dd.compose(_X3, shear), 1)
    cs = {}
    for m, c in S.iterterms():
        cs.setdefault(m[2], {})[(m[0], m[1], 0)] = c
    g = None
    for dct in cs.values():
        p = QQxyl.from_dict(dct)
        g = p if g is None else g.gcd(p)
    S = S.exquo(g) if g is not None and not g.is_zero else S
    return S


def log_part_reconstruction(Ft, residues, eps, verify=True):
    """``(k, R**k)`` with ``R**k = prod gcd(num - l (den_y + eps den_x), den)^(k l)``.

    ``k`` is the lcm of the residue denominators.  With ``verify`` the
    logarithmic derivative of ``R`` along ``eps d/dx + d/dy`` is checked to
    give back ``Ft``.
    """
    rs = []
    for r in residues:
        try:
            rs.append(QQ.convert(r))
        except Exception:
            raise FormError("not algebraic-logarithmic") from None
    k = reduce(lcm, (int(r.denominator) for r in rs), 1)
    Ft = as_frac(Ft)
    n, d = num_den(Ft)
    eps = QQ.convert(eps)
    ddy, ddx = dy(d), dx(d)
    acc = QQxy_field.one
    for r in rs:
        g = gcd_bivariate(n - (ddy + ddx * eps) * r, d)
        acc *= as_frac(g) ** int(r * k)
    if verify:
        got = (dy(acc) + eps * dx(acc)) / (k * acc)
        if got != Ft:
            raise FormError("logarithmic part does not reproduce the form")
    return k, acc


def check_log_derivative(k, Rk, F, G=None):
    """True iff ``d log(Rk)/k`` equals ``G dx + F dy``."""
    Rk = as_frac(Rk)
    if dy(Rk) / (k * Rk) != as_frac(F):
        return False
    if G is not None and dx(Rk) / (k * Rk) != as_frac(G):
        return False
    return True
