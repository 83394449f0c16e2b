import random

import pytest
from sympy import QQ

from firstint.kernel import (
    QQl, QQxy, as_frac, dx, dy, factor, is_constant, lcm_poly, num_den, rational_roots, x, y,
)
from firstint.oneform import (
    FormError, OneForm, RadicalFunction, hermite_reduction, liouvillian_residue_resultant,
    log_part_reconstruction, lx, make_oneform, normalize_form, reduced_violations, residue_poly_to_univariate,
    restrict_to_line, subtract_differential, trager_residue_poly,
)
from firstint.liouvillian import shear_generic
from helpers import P, R, V


def form(a, b, S=None, k=1):
    """``(a dx + b dy) / S^(1/k)`` for rational ``a, b``."""
    S = S if S is not None else QQxy.one
    (n1, d1), (n2, d2) = num_den(as_frac(a)), num_den(as_frac(b))
    L = lcm_poly(d1, d2)
    return normalize_form(n1 * L.exquo(d1), n2 * L.exquo(d2), L, S, k)


def line_frac(L):
    F = lx.ring.to_field()
    return F(L.P) / F(L.Q)


def test_make_oneform_examples(homog):
    w = make_oneform(V("1", "0"), R("1/y"), 1)
    assert (w.P1, w.P2, w.Q, w.S) == (0, 1, y, 1)
    w = make_oneform(homog, R("1/y"), 1)
    assert as_frac(w.P1) / as_frac(w.Q) == R("-1/x") and as_frac(w.P2) / as_frac(w.Q) == R("1/y")
    assert w.S == 1 and w.is_closed()
    X = V("3*x*(x+1)", "-y*(2*x+3)")
    w = make_oneform(X, R("-54*x^3*(x+1)^3/((2*y^3*x^3+2*x+2)^2*(x+1)^2)"), 3)
    assert w.k == 3 and w.is_closed()
    assert is_constant(as_frac(w.S) / as_frac(P("(y^3*x^3+x+1)^2*(x+1)^2")))
    assert all(m < 3 for _, m in factor(w.S))
    with pytest.raises(FormError):
        make_oneform(homog, R("0"), 1)


def test_restrict_to_line_examples(homog):
    w = make_oneform(homog, R("1/y"), 1)
    L = restrict_to_line(w, 1, 2)
    F = lx.ring.to_field()
    X_, Z_ = F.gens
    assert line_frac(L) == Z_ / (Z_ * (X_ - 1) + 2) - 1 / X_
    L0 = restrict_to_line(make_oneform(V("1", "0"), R("1/y"), 1), 0, 1, 0)
    assert L0.P == 0
    L1 = restrict_to_line(form(R("1/x"), R("0")), 1, 1, QQ(5, 3))
    assert line_frac(L1) == 1 / X_
    with pytest.raises(FormError, match="singular locus"):
        restrict_to_line(w, 0, 2)


def test_hermite_examples():
    w = form(R("0"), R("-1/y^2"))
    G = hermite_reduction(w)
    assert as_frac(G.U) / as_frac(G.V) == R("1/y")
    rest = subtract_differential(w, G)
    assert rest.P1 == 0 and rest.P2 == 0
    G = hermite_reduction(form(R("0"), R("1/y")))
    assert G.U == 0
    elliptic = OneForm(x, QQxy.zero, QQxy.one, P("x^3+1"), 2)
    assert elliptic.is_closed()
    assert hermite_reduction(elliptic) is None


def test_trager_examples():
    roots = lambda G: rational_roots(residue_poly_to_univariate(trager_residue_poly(G)))
    assert roots(R("1/(y*(y-1))")) == ([(QQ(-1), 1), (QQ(1), 1)], True)
    assert roots(R("2/y")) == ([(QQ(2), 1)], True)
    L = restrict_to_line(make_oneform(V("x", "y"), R("1/y"), 1), 1, 2)
    assert roots(L) == ([(QQ(-1), 1), (QQ(1), 1)], True)
    with pytest.raises(FormError, match="Hermite"):
        trager_residue_poly(R("1/y^2"))


def test_log_part_examples():
    assert log_part_reconstruction(R("1/(y^2-y)"), [1, -1], 0) == (1, R("(y-1)/y"))
    k, Rk = log_part_reconstruction(R("1/(2*y)"), [QQ(1, 2)], 0)
    assert k == 2 and Rk == R("y")
    assert log_part_reconstruction(R("3/y"), [3], 0) == (1, R("y^3"))
    with pytest.raises(FormError, match="algebraic-logarithmic"):
        log_part_reconstruction(R("1/y"), ["sqrt2"], 0)


# --- random suites ---------------------------------------------------------

def rand_poly(rng, deg, nterms=3):
    d = {}
    for _ in range(nterms):
        i = rng.randint(0, deg)
        j = rng.randint(0, deg - i)
        d[(i, j)] = QQ(rng.choice([-3, -2, -1, 1, 2, 3]))
    p = QQxy.from_dict(d)
    return p if not p.is_ground else x + y + 1


def rand_linear(rng):
    return QQxy.from_dict({(1, 0): QQ(rng.randint(-3, 3)), (0, 1): QQ(rng.choice([1, 2, -1])),
                           (0, 0): QQ(rng.randint(-4, 4))})


def random_log_function(rng, nfac=3):
    Rf = as_frac(QQxy.one)
    for _ in range(rng.randint(1, nfac)):
        f = rand_poly(rng, 2)
        Rf *= as_frac(f) ** rng.choice([-2, -1, 1, 2, 3])
    return Rf if not is_constant(Rf) else as_frac(x + 2 * y)


def dlog(Rf):
    return dx(Rf) / Rf, dy(Rf) / Rf


def random_hermite_case(rng, k):
    """``d(U/(V S^(1/k))) + reduced part``, closed by construction."""
    c = QQ(rng.randint(-3, 3))
    u = QQxy.from_dict({(1, 0): c, (0, 1): QQ.one})  # u = c x + y

    def comp(p):
        return p.compose(y, u)

    S = QQxy.one if k == 1 else comp(P("y^2+1") if rng.random() < 0.5 else P("y^3-y+3"))
    U = rand_poly(rng, 2)
    V = rand_linear(rng) * (rand_linear(rng) if rng.random() < 0.5 else QQxy.one)
    G = RadicalFunction(U, V, S, k)
    g1, g2 = G.differential()
    if k == 1:
        r1, r2 = dlog(random_log_function(rng))
    else:
        # P(u) du / (Q(u) S(u)^(1/k)) with Q(u) squarefree, reduced at infinity
        Qr = comp(P("y-5")) if rng.random() < 0.5 or S.degree(y) < k else QQxy.one
        Pr = QQ(rng.randint(1, 4))
        r1, r2 = as_frac(Pr * c) / as_frac(Qr), as_frac(Pr) / as_frac(Qr)
    w = form(g1 + r1, g2 + r2, S, k)
    assert w.is_closed()
    return w


def test_hermite_property_suite():
    rng = random.Random(2024)
    for i in range(50):
        w = random_hermite_case(rng, [1, 2, 3][i % 3])
        G = hermite_reduction(w)
        assert G is not None
        rest = subtract_differential(w, G)
        assert reduced_violations(rest) == []
        assert rest.is_closed()


def generic_eps(rng, Rf):
    """A slope for which no factor of ``Rf`` is constant along the lines."""
    n, d = num_den(Rf)
    while True:
        eps = QQ(rng.randint(1, 9), rng.randint(1, 5))
        if shear_generic(n * d, eps):
            return eps


def test_trager_round_trip_suite():
    rng = random.Random(77)
    for _ in range(50):
        Rf = random_log_function(rng)
        eps = generic_eps(rng, Rf)
        g, f = dlog(Rf)
        Ft = f + eps * g
        S = liouvillian_residue_resultant(Ft, eps)
        Sl = QQl.from_dict({(m[2],): c for m, c in S.iterterms()})
        assert all(not (m[0] or m[1]) for m in S.itermonoms())
        roots, ok = rational_roots(Sl)
        assert ok
        k, Rk = log_part_reconstruction(Ft, [r for r, _ in roots], eps)
        assert is_constant(Rk / Rf ** k)


def regular_line(w, rng, z=None):
    while True:
        x0, y0 = QQ(rng.randint(-30, 30), 7), QQ(rng.randint(-30, 30), 11)
        try:
            return restrict_to_line(w, x0, y0, z)
        except FormError:
            continue


def test_residue_sums_vanish():
    rng = random.Random(9)
    for _ in range(50):
        Rf = random_log_function(rng)
        w = form(*dlog(Rf))
        L = regular_line(w, rng, QQ(rng.randint(-5, 5), 3))
        if L.P.is_zero:
            continue
        roots, ok = rational_roots(residue_poly_to_univariate(trager_residue_poly(L)))
        assert ok
        finite = sum(r * m for r, m in roots)
        dP, dQ = L.P.degree(lx), L.Q.degree(lx)
        at_inf = -L.P.coeff(lx ** dP) / L.Q.coeff(lx ** dQ) if dP == dQ - 1 else 0
        assert finite + at_inf == 0


def test_residue_poly_is_slope_free():
    rng = random.Random(5)
    for _ in range(20):
        w = form(*dlog(random_log_function(rng)))
        L = regular_line(w, rng)
        Rz = trager_residue_poly(L, check_z=False)
        assert Rz.degree(Rz.ring.gens[1]) <= 0 and Rz.degree(Rz.ring.gens[0]) <= 0
