"""Reduction of a k-Darbouxian first integral to a rational one.

The integral is ``int w`` for the closed form ``w = -(B/A) F dx + F dy`` with
``F**k = Fk``.  After Hermite reduction the search splits on ``k``: for
``k = 1`` the logarithmic part is assembled from residues taken along a
pencil of lines; for ``k >= 2`` a Darbouxian ansatz, degree-bounded rational
searches and, for ``k = 2``, a torsion computation on the hyperelliptic
curve ``w^2 = S`` restricted to a line.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Optional

from sympy import QQ, Symbol, minimal_polynomial, sympify
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from .ansatz import AnsatzConfig, rational_fi_search, rational_solutions_system, solve_darbouxian_ansatz
from .field import (
    NONE_FOUND, NOT_HANDLED, REDUCED, Darbouxian, Outcome, Rational, SpecError,
    check_rational_coefficients, derivation_apply, verify_integral_spec,
)
from .kernel import (
    QQxy, QQxy_field, as_frac, degree, dx, dy, factor, is_constant,
    monomials_upto, rational_roots, squarefree_part, algebraic_field,
)
from .linop import LinOpY
from .oneform import (
    FormError, QQxz, hermite_reduction, is_regular_point, lx, make_oneform,
    radical_normal_form, residue_poly_to_univariate, restrict_to_line, trager_residue_poly,
)
from .superelliptic import (
    BuiltinTorsionOracle, CurveError, residue_divisor, residue_scale, moebius_normalize,
)


@dataclass
class DarbouxianConfig:
    seed: int = 0
    # cap on the degree of the step-5 rational search; None searches to the full bound
    max_degree: Optional[int] = None
    torsion_cap: int = 60
    torsion_oracle: Optional[object] = None
    use_torsion: bool = True
    extactic_cap: int = 3
    depth: int = 2
    base_point: Optional[tuple] = None
    ansatz: AnsatzConfig = field(default_factory=AnsatzConfig)

    def oracle(self):
        if self.torsion_oracle is not None:
            return self.torsion_oracle
        return BuiltinTorsionOracle(self.torsion_cap)


# ---------------------------------------------------------------------------
# degree bounds
# ---------------------------------------------------------------------------

def step5_bound(deg_sf_SQ):
    return max(0, 6 * (deg_sf_SQ - 1))


def step6_bound(k, deg_sf_Q, deg_sf_S):
    """``q + (2s + 3q)/(2k - 4)`` rounded down."""
    if k == 2:
        raise ValueError("bound undefined for k=2")
    if k < 3:
        raise ValueError("step 6 applies to k >= 3")
    return deg_sf_Q + (2 * deg_sf_S + 3 * deg_sf_Q) // (2 * k - 4)


def curve_degree_bound(k, deg_sf_Q, deg_sf_S):
    """Degree bound for the new invariant curves behind a step-6 integral."""
    step6_bound(k, deg_sf_Q, deg_sf_S)
    return (2 * deg_sf_S + 3 * deg_sf_Q) // (2 * k - 4)


def riccati_step7_bound(deg_Q, deg_num, deg_den):
    return max(6 * (deg_Q - 1), deg_num + 2, deg_den + 1)


@dataclass(frozen=True)
class DarbouxianBounds:
    step5: Optional[int]
    step6: Optional[int]
    riccati_step7: Optional[int]


def darbouxian_bounds(k, deg_sf_Q=0, deg_sf_S=0, deg_sf_SQ=None, riccati=None):
    """Integer bounds used by the searches.

    ``deg_sf_SQ`` defaults to ``deg_sf_Q + deg_sf_S``; ``riccati`` is the
    triple ``(deg Q, deg num F, deg den F)`` of the Riccati step-7 bound.
    """
    if k < 1:
        raise ValueError("k must be positive")
    sq = deg_sf_Q + deg_sf_S if deg_sf_SQ is None else deg_sf_SQ
    s6 = step6_bound(k, deg_sf_Q, deg_sf_S) if k >= 3 else None
    r7 = riccati_step7_bound(*riccati) if riccati is not None else None
    return DarbouxianBounds(step5_bound(sq), s6, r7)


# ---------------------------------------------------------------------------
# alpha-trace and Newton sums
# ---------------------------------------------------------------------------

def alpha_trace(beta, alpha):
    """The alpha-trace of the algebraic number ``beta``.

    The mean of the conjugates of ``beta`` over ``Q(alpha)`` is read in the
    power basis of ``alpha`` and its ``alpha`` coordinate returned.  For a
    rational ``alpha`` the mean over all conjugates is returned.
    """
    beta, alpha = sympify(beta), sympify(alpha)
    t = Symbol("t")
    if alpha.is_Rational:
        m = minimal_polynomial(beta, t, polys=True)
        c = m.all_coeffs()
        return QQ.convert(-c[1] / (c[0] * m.degree()))
    K = QQ.algebraic_field(alpha)
    try:
        m = minimal_polynomial(beta, t, domain=K, polys=True)
    except Exception as exc:
        raise ValueError(f"incompatible fields: {exc}") from exc
    c = [K.convert(a) if not hasattr(a, "to_list") else a for a in m.rep.to_list()]
    mean = -c[1] / (c[0] * m.degree())
    rep = list(reversed(mean.to_list()))
    return QQ.convert(rep[1]) if len(rep) > 1 else QQ.zero


def _alg_poly_coeff(c, K, a):
    """An element of ``K`` as a polynomial in the generator ``a``."""
    out = 0
    for e, q in enumerate(reversed(c.to_list())):
        if q:
            out += QQ.convert(q) * a ** e
    return out


def _mult_matrix(g, m, n, F):
    """Matrix of multiplication by ``g`` on ``F[a]/(m)`` in the basis ``1..a^(n-1)``."""
    a = g.ring.gens[0]
    cols = []
    for i in range(n):
        r = (g * a ** i).rem(m)
        cols.append([r.coeff(a ** j) if j else r.coeff(1) for j in range(n)])
    rows = [[cols[i][j] for i in range(n)] for j in range(n)]
    return DomainMatrix(rows, (n, n), F)


def rationalize_newton_sums(J, K=None):
    """A first nonconstant Newton sum ``S_j = sum_sigma sigma(alpha^j J)``.

    ``J`` is an element of ``K(x, y)`` (or of Q(x, y), returned unchanged);
    the sums are traces in ``Q(x, y)[a]/(m(a))``.
    """
    if K is None or K == QQ or getattr(J, "field", None) == QQxy_field:
        return as_frac(J)
    n = K.mod.degree()
    Fd = QQxy_field.to_domain()
    R, a = ring("a", QQxy_field)
    m = R.from_dict({(i,): QQxy_field(QQ.convert(c)) for i, c in enumerate(reversed(K.mod.to_list())) if c})

    def lift(p):
        out = R.zero
        for (i, j), c in p.iterterms():
            mono = QQxy_field(QQxy.gens[0] ** i * QQxy.gens[1] ** j)
            out += _alg_poly_coeff(c, K, a) * mono
        return out.rem(m)

    MN = _mult_matrix(lift(J.numer), m, n, Fd)
    MD = _mult_matrix(lift(J.denom), m, n, Fd)
    base = MN * MD.inv()
    Ma = _mult_matrix(a, m, n, Fd)
    cur = base
    for _ in range(1, n + 1):
        cur = Ma * cur
        S = sum((cur[i, i].element for i in range(n)), QQxy_field.zero)
        if not is_constant(S):
            return S
    raise AssertionError("all Newton sums are constant")


# ---------------------------------------------------------------------------
# the k = 1 logarithmic assembly
# ---------------------------------------------------------------------------

def _pick_alpha(R):
    """A nonzero residue as ``(minpoly, rational root or None)``."""
    roots, _ = rational_roots(R)
    nz = [r for r, _ in roots if r != 0]
    if nz:
        return None, min(nz, key=lambda r: (abs(r), -r))
    for f, _ in factor(R):
        if f.degree() > 1:
            return f, None
    return None, None


def _to_K(p, RK, K):
    return RK.from_dict({m: K.convert(c) for m, c in p.iterterms()}) if not p.is_zero else RK.zero


def _power_sums(q, n):
    """Power sums ``p_1..p_n`` of the roots of the univariate ``q``."""
    d = q.degree()
    lc = q.LC
    c = [q.coeff(q.ring.gens[0] ** (d - i)) / lc if d - i > 0 else q.coeff(1) / lc
         for i in range(d + 1)]
    p = [QQ.zero] * (n + 1)
    p[0] = d
    for k in range(1, n + 1):
        s = sum((c[i] * p[k - i] for i in range(1, min(k, d + 1))), c[0] * 0)
        p[k] = -s - (k * c[k] if k <= d else 0)
    return p


def _mean_residue(P, Qp, q, K):
    """Mean of ``P/Qp`` over the roots of the univariate ``q`` (coefficients in K)."""
    s, _, h = Qp.rem(q).gcdex(q)
    if not h.is_ground:
        raise FormError("not coprime")
    g = (P * s.quo_ground(h.LC)).rem(q)
    n = q.degree()
    ps = _power_sums(q, n)
    x = q.ring.gens[0]
    tr = sum((g.coeff(x ** j) * ps[j] if j else g.coeff(1) * ps[0] for j in range(n)), K.zero)
    return tr / n


def _eval_z(p, z1, RK1):
    """``p(x, z1)`` for ``p`` in ``K[x, z]`` as an element of ``K[x]``."""
    d = {}
    for (i, j), c in p.iterterms():
        d[(i,)] = d.get((i,), p.ring.domain.zero) + c * p.ring.domain.convert(z1) ** j
    return RK1.from_dict({m: c for m, c in d.items() if c}) if d else RK1.zero


def _alpha_coordinate(c, K):
    if K == QQ:
        return QQ.convert(c)
    rep = list(reversed(c.to_list()))
    return QQ.convert(rep[1]) if len(rep) > 1 else QQ.zero


def _homogenize(q, x0, y0, Rxy):
    """``q(x, (y-y0)/(x-x0)) (x-x0)^deg_z q`` in ``Rxy``, with ``x - x0`` factors removed."""
    X, Y = Rxy.gens
    dom = Rxy.domain
    n = q.degree(q.ring.gens[1])
    u = X - dom.convert(x0)
    v = Y - dom.convert(y0)
    out = Rxy.zero
    for (i, j), c in q.iterterms():
        out += c * X ** i * v ** j * u ** (n - j)
    while not out.is_zero and out.rem(u).is_zero:
        out = out.quo(u)
    return out


def _log_derivative_numerator(X, parts, Rxy):
    """``sum e_i D(P_i) prod_{l != i} P_l`` for ``parts = [(P_i, e_i)]``."""
    A = _to_K(X.A, Rxy, Rxy.domain)
    B = _to_K(X.B, Rxy, Rxy.domain)
    x, y = Rxy.gens
    total = Rxy.zero
    for i, (p, e) in enumerate(parts):
        if not e:
            continue
        term = e * (A * p.diff(x) + B * p.diff(y))
        for l, (q, _) in enumerate(parts):
            if l != i:
                term *= q
        total += term
    return total


def _assemble(parts, Rxy):
    num, den = Rxy.one, Rxy.one
    for p, e in parts:
        if e > 0:
            num *= p ** e
        elif e < 0:
            den *= p ** (-e)
    F = Rxy.to_field()
    return F(num) / F(den)


def k1_log_assembly(X, w, x0, y0, seed=0, trace=None):
    """Candidate rational first integral from the logarithmic part of ``w`` (k = 1).

    The residues of ``w`` restricted to ``y = z (x - x0) + y0`` are computed
    once; the factors of the polar locus over ``Q(alpha)`` get the
    alpha-traces of their mean residues as exponents.  The pencil base
    point can add a power of ``x - x0``; that exponent is solved for.
    Returns an element of Q(x, y) verified with ``D = 0``, or None.
    """
    out = trace if trace is not None else []
    L = restrict_to_line(w, x0, y0)
    if not L.S.is_ground:
        raise FormError("k must be 1")
    try:
        R = trager_residue_poly(L)
    except FormError as exc:
        out.append(("3b", "residue polynomial unavailable", {"reason": str(exc)}))
        return None
    if R.is_ground:
        out.append(("3b", "no finite residues", {}))
        return None
    Ru = residue_poly_to_univariate(R)
    minpoly, ralpha = _pick_alpha(Ru)
    if minpoly is None and ralpha is None:
        out.append(("3c", "all residues vanish", {}))
        return None
    K = QQ if minpoly is None else algebraic_field(minpoly)
    out.append(("3c", "alpha", {"alpha": str(ralpha) if minpoly is None else str(K.ext)}))
    RK, kx, kz = ring("x,z", K)
    RK1, kx1 = ring("x", K)
    P = _to_K(L.P, RK, K)
    if L.S != 1:
        P = P.quo_ground(K.convert(L.S.LC))
    Q = _to_K(L.Q, RK, K)
    Qx = Q.diff(kx)
    _, facs = Q.factor_list()
    facs = [f for f, _ in facs if f.degree(kx) > 0]
    rng = random.Random(seed)
    z1 = None
    for _ in range(50):
        cand = QQ(rng.randint(-40, 40), rng.randint(1, 5))
        q1 = _eval_z(Q, cand, RK1)
        if q1.degree() == Q.degree(kx) and q1.gcd(q1.diff(kx1)).is_ground:
            z1 = cand
            break
    if z1 is None:
        out.append(("3d", "no generic slope", {}))
        return None
    P1, Qx1 = _eval_z(P, z1, RK1), _eval_z(Qx, z1, RK1)
    ts = []
    for f in facs:
        q = _eval_z(f, z1, RK1)
        ts.append(_alpha_coordinate(_mean_residue(P1, Qx1, q, K), K))
    d = reduce(lcm, (int(t.denominator) for t in ts), 1)
    exps = [int(t * d) for t in ts]
    out.append(("3d", "exponents", {"t": [str(t) for t in ts], "d": d}))
    if not any(exps):
        out.append(("3e", "all alpha-traces vanish", {}))
        return None
    Rxy = ring("x,y", K)[0]
    parts = [(_homogenize(f, x0, y0, Rxy), e) for f, e in zip(facs, exps)]
    u = Rxy.gens[0] - K.convert(x0)
    N0 = _log_derivative_numerator(X, parts, Rxy)
    j = 0
    if not N0.is_zero:
        # N0 + j N1 = 0 with N1 the log-derivative along x - x0
        N1 = _log_derivative_numerator(X, [(u, 1)] + [(p, 0) for p, _ in parts], Rxy)
        jbound = d * sum(abs(t) * f.degree(kz) for t, f in zip(ts, facs))
        jq = _constant_ratio(N0, N1)
        if jq is None or jq.denominator != 1 or abs(jq) > jbound:
            out.append(("3e", "D(H) != 0", {"j_bound": str(jbound)}))
            return None
        j = -int(jq)
    H = _assemble(parts + [(u, j)], Rxy)
    out.append(("3e", "D(H) = 0", {"j": j}))
    if is_constant_over(H):
        out.append(("3e", "H constant", {}))
        return None
    J = rationalize_newton_sums(H, K) if K != QQ else _to_QQ(H)
    if is_constant(J) or derivation_apply(X, J) != 0:
        out.append(("3e", "rationalization failed", {}))
        return None
    return J


def _constant_ratio(a, b):
    """``a / b`` when it is a constant, else None."""
    if b.is_zero:
        return None
    q, r = a.div(b)
    if not r.is_zero or not q.is_ground:
        return None
    c = q.LC if not q.is_zero else q.ring.domain.zero
    if hasattr(c, "to_list"):
        rep = c.to_list()
        if len(rep) > 1:
            return None
        c = rep[0] if rep else QQ.zero
    return QQ.convert(c)


def is_constant_over(H):
    return H.numer.is_ground and H.denom.is_ground


def _to_QQ(H):
    conv = lambda p: QQxy.from_dict({m: QQ.convert(c) for m, c in p.iterterms()})
    return as_frac(conv(H.numer)) / as_frac(conv(H.denom))


# ---------------------------------------------------------------------------
# step 7 predicate
# ---------------------------------------------------------------------------

def _deg_x(p):
    return p.degree(p.ring.gens[0]) if not p.is_zero else None


def not_handled_predicate(L, k):
    """``k in {2,3,4,6}``, ``Q~`` constant and ``deg P~ - deg Q~ - deg S~/k < -1`` (in x)."""
    if k not in (2, 3, 4, 6):
        return False
    dP, dQ, dS = _deg_x(L.P), _deg_x(L.Q), _deg_x(L.S)
    if dP is None or dQ != 0:
        return False
    return Fraction(dP) - dQ - Fraction(dS, k) < -1


# ---------------------------------------------------------------------------
# invariant curves of bounded degree
# ---------------------------------------------------------------------------

def extactic_polynomial(X, n):
    """``det [D^j(m_i)]`` over the monomials ``m_i`` of degree ``<= n``."""
    mons = [QQxy.gens[0] ** a * QQxy.gens[1] ** b for a, b in monomials_upto(n)]
    N = len(mons)
    rows = []
    for m in mons:
        row = [m]
        for _ in range(N - 1):
            p = row[-1]
            row.append(X.A * dx(p) + X.B * dy(p))
        rows.append(row)
    dom = QQxy.to_domain()
    return DomainMatrix(rows, (N, N), dom).det()


def invariant_curves(X, n):
    """Irreducible invariant curves of degree ``<= n``, or None when a rational FI of degree ``<= n`` exists."""
    E = extactic_polynomial(X, n)
    if E.is_zero:
        return None
    out = []
    for f, _ in factor(E):
        if degree(f) < 1 or degree(f) > n:
            continue
        Df = X.A * dx(f) + X.B * dy(f)
        if Df.rem(f).is_zero:
            out.append(f)
    return out


# ---------------------------------------------------------------------------
# the k = 2 torsion branch
# ---------------------------------------------------------------------------

def _as_x(p):
    """A z-free ``QQ[x, z]`` polynomial as ``QQ[x, y]`` in x (for univariate routines)."""
    return QQxy.from_dict({(m[0], 0): c for m, c in p.iterterms()}) if not p.is_zero else QQxy.zero


def _limit_term(L):
    """``lim x P/(Q sqrt(S))`` squared, or 0 when the form vanishes to order 2 at infinity."""
    dP, dQ, dS = _deg_x(L.P), _deg_x(L.Q), _deg_x(L.S)
    if dS % 2 or dP - dQ - dS // 2 != -1:
        return QQ.zero
    cP, cQ, cS = (_lead_x(p) for p in (L.P, L.Q, L.S))
    r = (cP * cP)
    q = cQ * cQ * cS
    quo, rem = r.div(q)
    if not rem.is_zero or not quo.is_ground:
        raise FormError("limit at infinity depends on the slope")
    return QQ.convert(quo.LC) if not quo.is_zero else QQ.zero


def _lead_x(p):
    d = p.degree(lx)
    return QQxz.from_dict({(0, m[1]): c for m, c in p.iterterms() if m[0] == d})


def k2_residue_poly(L):
    """``res_x(P~^2 - mu Q~'^2 S~, Q~) (mu - lim^2)`` in ``mu = lambda^2``, over Q."""
    from .kernel import QQl
    from .oneform import _as_xzl, _primitive_in_l, _ll3, _lx3
    lim2 = _limit_term(L)
    P, Q, S = L.P, L.Q, L.S
    mu_lin = QQl.gens[0] - QQl(lim2) if lim2 != 0 else QQl.one
    if _deg_x(Q) == 0:
        return mu_lin
    from .kernel import resultant
    Pl, Ql, Sl = _as_xzl(P), _as_xzl(Q), _as_xzl(S)
    Rr = resultant(Pl * Pl - _ll3 * Ql.diff(_lx3) ** 2 * Sl, Ql, 0)
    Rr = _primitive_in_l(Rr)
    return residue_poly_to_univariate(Rr) * mu_lin


def squared_residues(L):
    """Nonzero roots ``mu = lambda^2`` and whether all are rational."""
    Rm = k2_residue_poly(L)
    roots, all_rat = rational_roots(Rm)
    return [r for r, _ in roots if r != 0], all_rat


def _choose_z0(w, x0, y0, rng, attempts=60):
    Lsym = restrict_to_line(w, x0, y0)
    dQ, dS = _deg_x(Lsym.Q), _deg_x(Lsym.S)
    for _ in range(attempts):
        z0 = QQ(rng.randint(-30, 30), rng.randint(1, 4))
        try:
            L0 = restrict_to_line(w, x0, y0, z0)
        except FormError:
            continue
        if _deg_x(L0.Q) != dQ or _deg_x(L0.S) != dS:
            continue
        QS = L0.Q * L0.S
        if QS.gcd(QS.diff(lx)).degree(lx) > 0:
            continue
        return z0, L0
    return None, None


def darbouxian_k2_branch(X, Fk, x0=None, y0=None, seed=0, torsion=None, E=None, ansatz=None):
    """The torsion branch for ``k = 2``; returns an ``Outcome``.

    The squared residues along a line must share one square class ``d2``;
    the residue divisor on ``w^2 = S`` (scaled by ``1/sqrt(d2)``) then has
    to be torsion.  Its order ``N`` makes ``H = exp(N int w / sqrt(d2))``
    algebraic, and ``H1 = (H + 1/H)/2`` is found as a rational solution of
    ``H_yy - (F_y/F) H_y - (N^2/d2) Fk H = 0`` with ``D(H) = 0``.
    """
    Fk = as_frac(Fk)
    out = Outcome(NONE_FOUND)
    w = make_oneform(X, Fk, 2)
    rng = random.Random(seed)
    if x0 is None:
        x0, y0 = choose_base_point(w, rng)
    if E is None:
        E = hermite_reduction(w)
    if E is None or not E.is_constant():
        return out.log("8a", "Hermite part missing or nonconstant")
    L = restrict_to_line(w, x0, y0)
    try:
        mus, all_rat = squared_residues(L)
    except FormError as exc:
        return out.log("8b", "residue polynomial unavailable", reason=str(exc))
    if not all_rat:
        return out.log("8c", "irrational squared residues")
    sc = residue_scale(mus)
    if sc is None:
        return out.log("8c", "residues not in a common d Z")
    d2, ns = sc
    out.log("8c", "residue scale", d2=str(d2), n=[int(n) for n in ns])
    z0, L0 = _choose_z0(w, x0, y0, rng)
    if z0 is None:
        return out.log("8d", "no generic slope")
    out.log("8d", "slope", z0=str(z0))
    try:
        div = residue_divisor(_as_x(L0.P), _as_x(L0.Q), _as_x(L0.S), d2)
    except CurveError as exc:
        return out.log("8d", "residue divisor unavailable", reason=str(exc))
    if div.C.degree() % 2 == 0:
        try:
            div, _ = moebius_normalize(div)
            out.log("8e", "Moebius normalization")
        except CurveError:
            out.log("8e", "no rational branch point; even degree kept")
    oracle = torsion if torsion is not None else BuiltinTorsionOracle()
    N = oracle.order(div)
    if N == 0:
        return out.log("8f", "not torsion", cap_limited=bool(getattr(oracle, "cap_limited", False)))
    out.log("8f", "torsion order", N=N)
    h = getattr(oracle, "last_witness", None)
    cap = None
    if h is not None:
        cap = max(_safe_deg(h.U1), _safe_deg(h.W), _safe_deg(h.U2) + (div.C.degree() + 1) // 2) + 2
    cfg = AnsatzConfig(max_x_degree_cap=cap, retry_doublings=(ansatz.retry_doublings if ansatz else 1),
                       seed=seed)
    op = LinOpY([-(QQ(N * N) / d2) * Fk, -dy(Fk) / (2 * Fk), QQxy_field.one])
    notes = []
    sols = rational_solutions_system(X, op, QQxy_field.zero, cfg, notes)
    for H1 in sols:
        if not is_constant(H1) and derivation_apply(X, H1) == 0:
            out.log("8g", "found", cap=cap)
            out.result, out.spec = REDUCED, Rational(H1)
            return out
    return out.log("8g", "no function with the divisor", cap=cap, notes=[n[1] for n in notes])


def _safe_deg(p):
    return p.degree() if p is not None and not p.is_zero else 0


# ---------------------------------------------------------------------------
# the reduction
# ---------------------------------------------------------------------------

def _small_rationals():
    vals = sorted({QQ(a, b) for a in range(-4, 5) for b in (1, 2, 3)}, key=lambda q: (abs(q.numerator) + q.denominator, q))
    return vals


def choose_base_point(w, rng):
    """A regular point of ``w`` from a seeded walk through small rationals."""
    vals = _small_rationals()
    pts = [(a, b) for a in vals for b in vals]
    pts.sort(key=lambda p: (abs(p[0].numerator) + abs(p[1].numerator) + p[0].denominator + p[1].denominator))
    head = pts[:80]
    rng.shuffle(head)
    for p in head + pts[80:]:
        if is_regular_point(w, *p):
            return p
    raise FormError("no regular base point found")


def minimal_radical(Fk, k):
    """``(k', Fk')`` with the same integral up to a constant factor and ``k'`` minimal."""
    P, Q, S = radical_normal_form(as_frac(Fk), k)
    if S.is_ground:
        return 1, as_frac(P) / as_frac(Q)
    facs = factor(S)
    g = reduce(gcd, [m for _, m in facs], k)
    if g == 1:
        return k, as_frac(Fk)
    k2 = k // g
    S2 = reduce(lambda a, b: a * b, (f ** (m // g) for f, m in facs), QQxy.one)
    return k2, as_frac(P) ** k2 / (as_frac(Q) ** k2 * as_frac(S2))


def _finish(X, out, step, spec):
    assert verify_integral_spec(X, spec)
    check_rational_coefficients(spec)
    out.log(step, "found", spec=spec.name)
    out.result = REDUCED
    out.spec = spec
    return out


def _recurse(X, f, config, depth, out, step):
    if depth >= config.depth:
        out.log(step, "recursion depth reached")
        return None
    sub = reduce_darbouxian(X, 1, f, config, _depth=depth + 1)
    out.log(step, "recursive call", result=sub.result, trace=[e.as_dict() for e in sub.trace])
    return sub if sub.reduced else None


def reduce_darbouxian(X, k, Fk, config=None, _depth=0):
    """Rational first integral from a k-Darbouxian one, as an ``Outcome``.

    Results are ``Reduced(Rational)``, ``NoneFound`` or ``NotHandled``.
    """
    config = config or DarbouxianConfig()
    Fk = as_frac(Fk)
    if not verify_integral_spec(X, Darbouxian(k, Fk)):
        raise SpecError("Fk does not describe a Darbouxian first integral of X")
    out = Outcome(NONE_FOUND)
    k0 = k
    k, Fk = minimal_radical(Fk, k)
    if k != k0:
        out.log("0", "radical exponent lowered", k=k)
    w = make_oneform(X, Fk, k)

    E = hermite_reduction(w)
    if E is not None and not E.is_constant():
        J = E.kth_power()
        if not is_constant(J) and derivation_apply(X, J) == 0:
            return _finish(X, out, "1", Rational(J))
        out.log("1", "Hermite part is not a first integral")
    else:
        out.log("1", "no Hermite part" if E is None else "Hermite part constant")

    rng = random.Random(config.seed)
    x0, y0 = config.base_point if config.base_point else choose_base_point(w, rng)
    x0, y0 = QQ.convert(x0), QQ.convert(y0)
    out.log("2", "base point", x0=str(x0), y0=str(y0))

    if k == 1:
        if E is None or not E.is_constant():
            return out.log("3a", "Hermite part missing or nonconstant")
        notes = []
        J = k1_log_assembly(X, w, x0, y0, config.seed, notes)
        out.log("3", "log assembly", notes=[dict(step=s_, status=m, **d) for s_, m, d in notes])
        if J is not None:
            return _finish(X, out, "3", Rational(J))
        return out.log("3", "none found")

    Qs = squarefree_part(w.Q) if not w.Q.is_ground else QQxy.one
    q = degree(Qs)
    f = solve_darbouxian_ansatz(X, Qs, q - 1)
    if f is not None:
        out.log("4", "1-Darbouxian integral found")
        sub = _recurse(X, f, config, _depth, out, "4")
        if sub is not None:
            return _finish(X, out, "4", sub.spec)
    else:
        out.log("4", "not found", bound=q - 1)

    Ss = squarefree_part(w.S) if not w.S.is_ground else QQxy.one
    s = degree(Ss)
    SQ = w.S * w.Q
    b5 = step5_bound(degree(squarefree_part(SQ)) if not SQ.is_ground else 0)
    if config.max_degree is not None and config.max_degree < b5:
        out.log("5", "degree bound capped", bound=b5, cap=config.max_degree)
        b5 = config.max_degree
    notes = []
    J = rational_fi_search(X, b5, config.ansatz, notes)
    if J is not None:
        return _finish(X, out, "5", Rational(J))
    out.log("5", "not found", bound=b5, notes=[n[1] for n in notes])

    if k >= 3:
        spec = _step6(X, w, k, q, s, Qs, config, _depth, out)
        if spec is not None:
            return _finish(X, out, "6", spec)

    L = restrict_to_line(w, x0, y0)
    pred = not_handled_predicate(L, k)
    out.log("7", "predicate", value=pred)
    if pred:
        out.result = NOT_HANDLED
        return out

    if k >= 3:
        return out.log("8", "none found")
    sub = darbouxian_k2_branch(X, Fk, x0, y0, config.seed, config.oracle(), E, config.ansatz) \
        if config.use_torsion else Outcome(NONE_FOUND).log("8", "torsion oracle disabled")
    out.trace.extend(sub.trace)
    if sub.reduced:
        return _finish(X, out, "8", sub.spec)
    return out


def _step6(X, w, k, q, s, Qs, config, depth, out):
    u = curve_degree_bound(k, q, s)
    out.log("6", "curve degree bound", bound=u, total=step6_bound(k, q, s))
    if u == 0:
        curves = []
    else:
        if u > config.extactic_cap:
            out.log("6", "curve degree capped", bound=u, cap=config.extactic_cap)
            u = config.extactic_cap
        curves = invariant_curves(X, u)
        if curves is None:
            J = rational_fi_search(X, u, config.ansatz)
            if J is not None:
                return Rational(J)
            out.log("6", "extactic vanishes but no rational integral of bounded degree")
            return None
    V = Qs
    for c in curves:
        if not V.rem(c).is_zero:
            V = V * c
    if V.is_ground:
        out.log("6", "no candidate polar curves")
        return None
    f = solve_darbouxian_ansatz(X, V, degree(V) - 1)
    if f is None:
        out.log("6", "not found", curves=len(curves))
        return None
    sub = _recurse(X, f, config, depth, out, "6")
    return sub.spec if sub is not None else None

