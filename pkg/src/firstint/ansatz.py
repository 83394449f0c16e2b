"""Bounded-degree undetermined-coefficient solvers.

All solvers reduce to the kernel of a linear map over Q, computed exactly by
sympy's ``DomainMatrix``.  Unknowns are ordered by ascending graded-lex
monomial, so the first kernel basis vector is the "smallest" solution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from . import leaf
from .field import darbouxian_residual, derivation_apply, is_rational_first_integral
from .kernel import (
    QQxy, as_frac, as_poly, coeffs_in, degree, degree_in, dx, dy, factor, is_constant,
    lcm_poly, monomials_upto, num_den, primitive_normal, rational_roots,
)


@dataclass
class AnsatzConfig:
    """Caps for the searches whose bounds are not fixed by theory."""

    max_x_degree_cap: Optional[int] = None
    retry_doublings: int = 1
    seed: int = 0
    leaf_points: int = 6


@dataclass
class AnsatzProblem:
    """A linear residual over the span of ``basis`` (used for tracing)."""

    unknown_degree_bound: int
    fixed_denominator: Optional[object] = None
    linear_conditions: str = ""
    basis: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

def nullspace_of_images(images):
    """Kernel of ``u -> sum(u[i] * images[i])`` for polynomial images.

    ``images`` are polynomials (any ring); returns kernel basis rows as
    lists of QQ in RREF order.
    """
    n = len(images)
    if n == 0:
        return []
    rows = {}
    for j, im in enumerate(images):
        for m, c in im.iterterms():
            rows.setdefault(m, {})[j] = QQ.convert(c)
    if not rows:
        return [[QQ(int(i == j)) for i in range(n)] for j in range(n)]
    keys = sorted(rows)
    sdm = {i: rows[k] for i, k in enumerate(keys)}
    M = DomainMatrix(sdm, (len(keys), n), QQ)
    K = M.nullspace().to_dense().rep.to_ddm()
    return [list(r) for r in K]


def common_numerators(fracs):
    """Numerators of ``fracs`` over their common denominator."""
    dens = [num_den(f)[1] for f in fracs]
    L = reduce(lcm_poly, dens, QQxy.one)
    out = []
    for f in fracs:
        n, d = num_den(f)
        out.append(n * L.exquo(d))
    return out, L


def _combine(basis, vec):
    acc = QQxy.zero
    for b, c in zip(basis, vec):
        if c:
            acc += b * c
    return acc


def mon(m):
    return QQxy({m: QQ.one})


# ---------------------------------------------------------------------------
# fixed-denominator ansatz
# ---------------------------------------------------------------------------

def solve_fixed_denominator_fi(X, Q, degP):
    """Nonconstant ``P/Q`` with ``deg P <= degP`` and ``D(P/Q) = 0``, or None."""
    Q = as_poly(Q)
    if Q.is_zero:
        raise ValueError("Q = 0")
    if degP < 0:
        return None
    mons = [mon(m) for m in monomials_upto(degP)]
    DQ = X.A * dx(Q) + X.B * dy(Q)
    images = [Q * (X.A * dx(p) + X.B * dy(p)) - p * DQ for p in mons]
    for vec in nullspace_of_images(images):
        P = _combine(mons, vec)
        J = as_frac(P) / as_frac(Q)
        if not is_constant(J):
            assert derivation_apply(X, J) == 0
            return J
    return None


def solve_darbouxian_ansatz(X, Q, degP):
    """Nonzero ``P/Q`` with ``deg P <= degP`` and zero Darbouxian residual, or None."""
    Q = as_poly(Q)
    if Q.is_zero:
        raise ValueError("Q = 0")
    if degP < 0:
        return None
    A, B = X.A, X.B
    mons = [mon(m) for m in monomials_upto(degP)]
    DQ = A * dx(Q) + B * dy(Q)
    w = A * dy(B) - B * dy(A)
    # A*Q^2 * residual, linear in P
    images = [A * (Q * (A * dx(p) + B * dy(p)) - p * DQ) + w * p * Q for p in mons]
    ker = nullspace_of_images(images)
    if not ker:
        return None
    P = _combine(mons, ker[0])
    f = as_frac(P) / as_frac(Q)
    assert darbouxian_residual(X, f) == 0
    return f


# ---------------------------------------------------------------------------
# rational first integrals of bounded degree
# ---------------------------------------------------------------------------

def _random_points(X, rng, count, primes_):
    pts = []
    tries = 0
    while len(pts) < count and tries < 50 * count + 100:
        tries += 1
        a = QQ(rng.randint(-40, 40), rng.randint(1, 9))
        b = QQ(rng.randint(-40, 40), rng.randint(1, 9))
        if any(pt == (a, b) for pt in pts):
            continue
        if X.A.evaluate([(X.A.ring.gens[0], a), (X.A.ring.gens[1], b)]) == 0 and \
                X.B.evaluate([(X.B.ring.gens[0], a), (X.B.ring.gens[1], b)]) == 0:
            continue
        try:
            for p in primes_:
                leaf._mod(a, p), leaf._mod(b, p)
                for poly in (X.A, X.B):
                    for c in poly.itercoeffs():
                        leaf._mod(c, p)
        except ZeroDivisionError:
            continue
        pts.append((a, b))
    return pts


def _leaf_degree(jet, bound, start=1):
    for d in range(start, bound + 1):
        mons, ker = jet.curve_kernel(d)
        if ker:
            return d, mons, ker
    return None, None, None


def _canonical_pencil_mod(k1, k2, mons, p):
    """RREF (descending graded-lex columns) of the pencil spanned by two curves."""
    order = list(range(len(mons)))[::-1]
    rows = [[int(k1[i]) for i in order], [int(k2[i]) for i in order]]
    R, piv = leaf.rref_mod(rows, p)
    return R, piv, [mons[i] for i in order]


def _reconstruct_pencil(residues, moduli):
    """CRT + rational reconstruction of a list of integer matrices."""
    from sympy.ntheory.modular import crt
    shape = residues[0].shape
    flat = [r.reshape(-1) for r in residues]
    m = 1
    for q in moduli:
        m *= q
    out = []
    for idx in range(len(flat[0])):
        v = int(crt(moduli, [int(f[idx]) for f in flat])[0])
        q = leaf.rational_reconstruction(v, m)
        if q is None:
            return None
        out.append(q)
    return np.array(out, dtype=object).reshape(shape)


def _pencil_to_integral(R, cols):
    polys = []
    for row in R:
        polys.append(QQxy.from_dict({m: c for m, c in zip(cols, row) if c}))
    P1, P2 = polys
    if len(polys) != 2 or P1.is_zero or P2.is_zero:
        return None
    if P2.is_ground:
        J = primitive_normal(P1)[1]
        # orient so that the smallest nonconstant monomial has positive sign
        small = min((m for m in J.itermonoms() if sum(m)), key=lambda m: (sum(m), m))
        if J[small] < 0:
            J = -J
        return as_frac(J)
    if P1.is_ground:
        return as_frac(primitive_normal(P2)[1])
    if degree(P2) > degree(P1):
        P1, P2 = P2, P1
    elif degree(P2) == degree(P1):
        P1, P2 = P2, P1
    return as_frac(primitive_normal(P1)[1]) / as_frac(primitive_normal(P2)[1])


def rational_fi_search(X, degree_bound, config=None, trace=None):
    """A nonconstant rational first integral of degree ``<= degree_bound``, or None.

    For one generic point the leaf degree is found modulo a prime; an empty
    modular kernel at every degree certifies that no rational first integral
    of degree ``<= degree_bound`` exists.  Otherwise the leaves through two
    generic points span the pencil of a primitive first integral, which is
    lifted to Q by CRT and rational reconstruction and verified exactly.
    """
    config = config or AnsatzConfig()
    if degree_bound < 1:
        return None
    rng = random.Random(config.seed)
    plist = leaf.primes(8)
    pts = _random_points(X, rng, config.leaf_points, plist)
    p0 = plist[0]
    jets = {}

    def jet(pt, p):
        key = (pt, p)
        if key not in jets:
            jets[key] = leaf.LeafJet(X, pt, degree_bound, p)
        return jets[key]

    e, mons, ker = _leaf_degree(jet(pts[0], p0), degree_bound)
    if e is None:
        if trace is not None:
            trace.append(("rational_fi_search", "certified-none", {"bound": degree_bound}))
        return None
    start = e
    for attempt_deg in range(start, degree_bound + 1):
        cands = []
        for pt in pts:
            d, mons_d, ker_d = _leaf_degree(jet(pt, p0), attempt_deg, start=attempt_deg) \
                if attempt_deg > start or pt != pts[0] else (e, mons, ker)
            if d == attempt_deg and len(ker_d) == 1:
                cands.append(pt)
        for i in range(len(cands)):
            for j in range(i + 1, len(cands)):
                J = _lift_pencil(X, cands[i], cands[j], attempt_deg, plist, jet)
                if J is not None:
                    if trace is not None:
                        trace.append(("rational_fi_search", "found", {"degree": attempt_deg}))
                    return J
    if trace is not None:
        trace.append(("rational_fi_search", "not-found", {"bound": degree_bound}))
    return None


def _lift_pencil(X, pt1, pt2, d, plist, jet):
    residues, moduli = [], []
    shape_ref = None
    for p in plist:
        mons, k1 = jet(pt1, p).curve_kernel(d)
        _, k2 = jet(pt2, p).curve_kernel(d)
        if len(k1) != 1 or len(k2) != 1:
            continue
        R, piv, cols = _canonical_pencil_mod(k1[0], k2[0], mons, p)
        if R.shape[0] != 2:
            return None
        if shape_ref is None:
            shape_ref = (tuple(piv), cols)
        elif tuple(piv) != shape_ref[0]:
            continue
        residues.append(R)
        moduli.append(p)
        rec = _reconstruct_pencil(residues, moduli)
        if rec is None:
            continue
        J = _pencil_to_integral(rec, shape_ref[1])
        if J is not None and is_rational_first_integral(X, J):
            return J
    return None


# ---------------------------------------------------------------------------
# rational solutions of the coupled linear system
# ---------------------------------------------------------------------------

_Q3, _x3, _y3, _s3 = ring("x,y,s", QQ)
_Qs, _s1 = ring("s", QQ)


def _lift3(p):
    return _Q3.from_dict({(m[0], m[1], 0): c for m, c in p.iterterms()}) if p else _Q3.zero


def _falling(s, i):
    acc = _Q3.one
    for t in range(i):
        acc *= (s - t)
    return acc


def _s_polys_gcd(H):
    """gcd over all (x, y)-coefficients of ``H(x, y, s)`` as a polynomial in s."""
    coeffs = {}
    for m, c in H.iterterms():
        coeffs.setdefault((m[0], m[1]), {})[(m[2],)] = c
    g = _Qs.zero
    for d in coeffs.values():
        g = g.gcd(_Qs.from_dict(d))
    return g


def _integer_roots(g):
    if g.is_zero:
        return None  # every s is a root
    if g.is_ground:
        return []
    roots, _ = rational_roots(g)
    return sorted(int(r) for r, _ in roots if QQ.convert(r).denominator == 1)


def _valuation(p, f):
    v = 0
    while not p.is_zero:
        q, r = p.div(f)
        if not r.is_zero:
            break
        p, v = q, v + 1
    return v


def _frac_valuation(a, f):
    n, d = num_den(a)
    return _valuation(n, f) - _valuation(d, f), n, d


def local_exponents(op, f):
    """Integer roots of the indicial equation of ``op`` at the irreducible ``f``.

    Returns None when the indicial polynomial vanishes identically.
    """
    a = op.monic().coefficients
    n = op.order
    vals = {}
    for i in range(n + 1):
        if a[i] != 0:
            vals[i] = _frac_valuation(a[i], f)
    mu = min(v[0] - i for i, v in vals.items())
    fy = dy(f)
    terms = []
    dens = []
    for i, (v, nn, dd) in vals.items():
        if v - i != mu:
            continue
        # g_i = a_i / f^v as numerator/denominator, both coprime with f
        if v >= 0:
            gn, gd = nn.exquo(f ** v), dd
        else:
            gn, gd = nn, dd.exquo(f ** (-v))
        terms.append((i, gn * fy ** i, gd))
        dens.append(gd)
    L = reduce(lambda u, w: u * w, dens, QQxy.one)
    H = _Q3.zero
    for i, gn, gd in terms:
        H += _lift3(gn * L.exquo(gd)) * _falling(_s3, i)
    r = H.prem(_lift3(f), _y3)
    return _integer_roots(_s_polys_gcd(r))


def infinity_exponents(op):
    """Integer roots of the indicial equation of ``op`` at ``y = oo``."""
    a = op.monic().coefficients
    best = None
    data = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        n, d = num_den(c)
        dn, dd = degree_in(n, 1), degree_in(d, 1)
        lcn = coeffs_in(n, 1)[dn]
        lcd = coeffs_in(d, 1)[dd]
        data.append((i, dn - dd - i, lcn, lcd))
        best = dn - dd - i if best is None else max(best, dn - dd - i)
    sel = [t for t in data if t[1] == best]
    L = reduce(lambda u, w: u * w, (t[3] for t in sel), QQxy.one)
    H = _Q3.zero
    for i, _, lcn, lcd in sel:
        H += _lift3(lcn * L.exquo(lcd)) * _falling(_s3, i)
    # W ~ y^s at infinity: the dominant terms carry [s]_i
    return _integer_roots(_s_polys_gcd(H))


def _y_dependent_factors(polys):
    out = []
    for p in polys:
        if p.is_ground:
            continue
        for f, _ in factor(p):
            if degree_in(f, 1) > 0 and f not in out:
                out.append(f)
    return out


def _x_only_factors(p):
    return [f for f, _ in factor(p) if degree_in(f, 1) <= 0 and not f.is_ground] if not p.is_ground else []


def _input_degree(X, op):
    d = max(degree(X.A), degree(X.B))
    for c in op.coefficients:
        n, dd = num_den(c)
        d = max(d, degree(n), degree(dd))
    return d


def rational_solutions_system(X, op, x_constraint, config=None, trace=None):
    """A Q-basis of rational ``W`` with ``op(W) = 0`` and ``D(W) = c W``.

    Poles in y are located at the singularities of ``op`` with orders from
    the indicial equations; poles in x alone must divide ``A``.  The
    numerator x-degree and the x-pole orders are bounded by the configured
    cap, doubled on failure ``retry_doublings`` times.
    """
    config = config or AnsatzConfig()
    c = as_frac(x_constraint)
    opm = op.monic()
    dens = [num_den(a)[1] for a in opm.coefficients[:-1] if a != 0]
    yfacs = _y_dependent_factors(dens)
    den_y = QQxy.one
    for f in yfacs:
        roots = local_exponents(opm, f)
        if roots is not None and not roots:
            _note(trace, "no integer exponent at a singular point")
            return []
        e = 0 if roots is None else max(0, -min(roots))
        den_y *= f ** e
    inf = infinity_exponents(opm)
    if inf is not None and not inf:
        _note(trace, "no integer exponent at infinity")
        return []
    if inf is None:
        raise ValueError("indicial polynomial at infinity vanishes identically")
    ydeg = max(inf) + degree_in(den_y, 1)
    if ydeg < 0:
        return []
    xfacs = _x_only_factors(X.A)
    cap = config.max_x_degree_cap
    if cap is None:
        cap = 2 * _input_degree(X, op) + 4
    for attempt in range(config.retry_doublings + 1):
        gx = QQxy.one
        for g in xfacs:
            gx *= g ** cap
        Den = den_y * gx
        xdeg = cap + degree_in(Den, 0)
        sols = _solve_system_on_box(X, opm, c, Den, xdeg, ydeg)
        _note(trace, f"rational system cap={cap}", found=len(sols))
        if sols:
            return sols
        cap *= 2
    return []


def _note(trace, msg, **data):
    if trace is not None:
        trace.append(("ansatz", msg, data))


def _solve_system_on_box(X, op, c, Den, xdeg, ydeg):
    mons = [(i, j) for j in range(ydeg + 1) for i in range(xdeg + 1)]
    mons.sort(key=lambda m: (sum(m), m))
    Denf = as_frac(Den)
    basis = [as_frac(mon(m)) / Denf for m in mons]
    r1, _ = common_numerators([op.apply(b) for b in basis])
    r2, _ = common_numerators([derivation_apply(X, b) - c * b for b in basis])
    images = []
    # stack both conditions by shifting the second one into a fresh variable slot
    for u, w in zip(r1, r2):
        images.append(_tag(u, 0) + _tag(w, 1))
    ker = nullspace_of_images(images)
    out = []
    for vec in ker:
        N = _combine([mon(m) for m in mons], vec)
        W = as_frac(N) / Denf
        assert op.apply(W) == 0 and derivation_apply(X, W) == c * W
        out.append(W)
    return out


_TAG, _tx, _ty, _tt = ring("x,y,t", QQ)


def _tag(p, k):
    return _TAG.from_dict({(m[0], m[1], k): cf for m, cf in p.iterterms()}) if p else _TAG.zero


# ---------------------------------------------------------------------------
# hyperexponential solutions (second-order case)
# ---------------------------------------------------------------------------

def hyperexponential_solutions_system(X, op, x_constraint, seed=0, trace=None):
    """Pairs ``(R_y/R, R_x/R)`` of hyperexponential solutions of the system.

    ``op`` has order 1 or 2.  The y-logarithmic derivative is built from
    local exponents in the Kovacic manner over the coefficient field Q(x);
    the x-logarithmic derivative is forced by ``D(R) = c R`` and closedness
    is verified.  Local data that are algebraic but not in Q(x) are not
    explored (recorded in ``trace``).
    """
    from .kovacic import kovacic_case1
    c = as_frac(x_constraint)
    opm = op.monic()
    A, B = as_frac(X.A), as_frac(X.B)
    if opm.order == 1:
        us = [-opm.coefficients[0]]
    elif opm.order == 2:
        a0, a1 = opm.coefficients[0], opm.coefficients[1]
        r = a1 ** 2 / 4 + dy(a1) / 2 - a0
        us = [u - a1 / 2 for u in kovacic_case1(r, trace=trace)]
    else:
        raise ValueError("hyperexponential search supports order 1 and 2 only")
    out = []
    for u in us:
        v = (c - B * u) / A
        if dx(u) != dy(v):
            continue
        pair = (u, v)
        if pair not in out:
            out.append(pair)
    return out
