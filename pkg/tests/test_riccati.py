import random

import pytest
from sympy import QQ

from firstint.field import (
    REDUCED, Darbouxian, Liouvillian, Rational, Riccati, SpecError, functionally_dependent,
    verify_integral_spec,
)
from firstint.kernel import QQxy, as_frac, dy, has_rational_coefficients, x, y
from firstint.linop import LinOpY, base_operator
from firstint.liouvillian import reduce_liouvillian
from firstint.riccati import (
    RiccatiConfig, discriminant, gauge_twist, reduce_riccati, schwarzian_y, special_polynomial,
    special_polynomial_sym4, symmetric_power_op,
)
from helpers import R, V


def random_F(rng, rational=True):
    num = QQxy.from_dict({(rng.randint(0, 2), rng.randint(0, 2)): QQ(rng.randint(-4, 4))
                          for _ in range(3)}) or QQxy.one
    den = QQxy.one
    if rational:
        den = QQxy.from_dict({(rng.randint(0, 1), rng.randint(0, 2)): QQ(rng.randint(1, 3)),
                              (0, 0): QQ(rng.randint(1, 5))})
    return as_frac(num) / as_frac(den)


def test_symmetric_power_examples():
    assert symmetric_power_op(base_operator(R("0")), 2) == LinOpY([0, 0, 0, 1])
    F = R("x*y/(y+1)")
    assert symmetric_power_op(base_operator(F), 1) == base_operator(F)
    assert symmetric_power_op(base_operator(F), 2) == LinOpY([-2 * dy(F), -4 * F, 0, 1])
    with pytest.raises(ValueError):
        symmetric_power_op(base_operator(F), 0)


def test_symmetric_square_identity_random():
    rng = random.Random(10)
    for _ in range(10):
        F = random_F(rng)
        assert symmetric_power_op(base_operator(F), 2) == LinOpY([-2 * dy(F), -4 * F, 0, 1])


def _truncate(p, N):
    return QQxy.from_dict({m: c for m, c in p.iterterms() if m[1] < N}) if p else p


def test_symmetric_power_annihilates_products():
    rng = random.Random(21)
    N = 14
    for _ in range(10):
        F = random_F(rng, rational=False).numer
        y1, y2 = _series_solutions_poly(F, N)
        for m in range(1, 5):
            L = symmetric_power_op(base_operator(as_frac(F)), m)
            for a in range(m + 1):
                w = _truncate(y1 ** a * y2 ** (m - a), N)
                out = L.apply(as_frac(w)).numer
                assert _truncate(out, N - m - 1) == 0


def _series_solutions_poly(F, N):
    Fc = {}
    for (i, j), c in F.iterterms():
        Fc[j] = Fc.get(j, QQxy.zero) + c * x ** i
    def solve(c0, c1):
        cs = [QQxy(c0), QQxy(c1)]
        for n in range(N - 2):
            acc = QQxy.zero
            for j in range(n + 1):
                if j in Fc:
                    acc += Fc[j] * cs[n - j]
            cs.append(acc.quo_ground(QQ((n + 2) * (n + 1))))
        return sum((c * y ** i for i, c in enumerate(cs)), QQxy.zero)
    return solve(1, 0), solve(0, 1)


def test_gauge_twist():
    op = base_operator(R("x/(y+2)"))
    assert gauge_twist(op, R("1"), 2) == op.monic()
    tw = gauge_twist(base_operator(R("1")), R("y^2"), 2)
    assert tw.coefficients[1] == R("2/y")
    back = gauge_twist(tw, R("1/y^2"), 2)
    assert back == base_operator(R("1")).monic()


def test_special_polynomial_examples():
    b1, b0 = special_polynomial(R("1"), R("1"))
    assert (b1, b0) == (0, -1) and discriminant(b1, b0) == 4
    b1, b0 = special_polynomial(R("0"), R("y^2/x"))
    assert b1 == R("-2/y") and b0 == R("1/y^2") and discriminant(b1, b0) == 0
    assert special_polynomial(R("0"), R("x")) == (0, 0)
    with pytest.raises(ValueError):
        special_polynomial(R("0"), R("0"))


def test_special_polynomial_sym4_on_square():
    # R = (y1 y2)^2 = 1 for e^(+-y): the roots +-1 give u^2 - 1
    assert special_polynomial_sym4(R("1"), R("1")) == (0, -1)


def test_schwarzian_examples():
    assert schwarzian_y(R("y")) == 0
    assert schwarzian_y(R("1/y")) == 0
    assert schwarzian_y(R("y^2")) == R("-3/(2*y^2)")
    with pytest.raises(ValueError, match="constant in y"):
        schwarzian_y(R("x"))


def test_schwarzian_moebius_invariance():
    rng = random.Random(8)
    done = 0
    while done < 20:
        f = random_F(rng)
        if dy(f) == 0:
            continue
        a, b, c, d = (QQ(rng.randint(-4, 4)) for _ in range(4))
        if a * d - b * c == 0:
            continue
        done += 1
        assert schwarzian_y((a * f + b) / (c * f + d)) == schwarzian_y(f)


def test_riccati_integral_has_schwarzian_minus_2F():
    # y/x is a quotient of the solutions x, y of W''=0 for (x, y)
    assert schwarzian_y(R("y/x")) == -2 * R("0")


def test_reduce_riccati_step1():
    out = reduce_riccati(V("1", "0"), R("0"))
    assert out.spec == Darbouxian(1, R("1"))
    assert out.trace[-1].step == "1"


def test_reduce_riccati_step2_chains_to_rational(homog):
    out = reduce_riccati(homog, R("0"))
    assert isinstance(out.spec, Liouvillian) and out.trace[-1].step == "2a"
    nxt = reduce_liouvillian(homog, out.spec.F)
    assert isinstance(nxt.spec, Rational) and functionally_dependent(nxt.spec.J, R("y/x"))


def test_reduce_riccati_dihedral():
    X = V("1", "0")
    out = reduce_riccati(X, R("(16*y-3)/(16*y^2)"))
    assert out.result == REDUCED and out.spec.rank < Riccati.rank
    assert verify_integral_spec(X, out.spec)


def test_reduce_riccati_exponential_case():
    X = V("1", "0")
    out = reduce_riccati(X, R("1"))
    assert out.result == REDUCED and verify_integral_spec(X, out.spec)


def test_reduce_riccati_airy_field_has_rational_integral():
    # y is a first integral of (1, 0): the reduction must find a lower class integral
    out = reduce_riccati(V("1", "0"), R("y"))
    assert isinstance(out.spec, Rational) and out.trace[-1].step == "7"


def test_invalid_riccati_rejected(homog):
    with pytest.raises(SpecError):
        reduce_riccati(homog, R("x"))


def test_soundness_over_cases():
    cases = [(V("1", "0"), R("0")), (V("x", "y"), R("0")), (V("1", "0"), R("1")),
             (V("1", "0"), R("(16*y-3)/(16*y^2)")), (V("1", "0"), R("y"))]
    for X, F in cases:
        out = reduce_riccati(X, F, RiccatiConfig(seed=1))
        assert out.reduced and verify_integral_spec(X, out.spec)
        assert all(has_rational_coefficients(f) for f in out.spec.rational_data())
        if isinstance(out.spec, Liouvillian):
            reduce_liouvillian(X, out.spec.F)
