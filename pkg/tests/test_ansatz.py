import random

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from firstint.ansatz import (
    hyperexponential_solutions_system, rational_fi_search, rational_solutions_system,
    solve_darbouxian_ansatz, solve_fixed_denominator_fi,
)
from firstint.field import (
    VectorField, darbouxian_residual, derivation_apply, functionally_dependent,
    is_rational_first_integral,
)
from firstint.kernel import QQxy, QQxy_field, degree, dx, dy, gcd_bivariate, has_rational_coefficients, monomials_upto, x, y
from firstint.linop import LinOpY, base_operator
from helpers import P, R, V

K3_FIELD = V("3*x*(x+1)", "-y*(2*x+3)")


def test_fixed_denominator(homog):
    J = solve_fixed_denominator_fi(homog, x, 1)
    assert J == R("y/x")
    assert solve_fixed_denominator_fi(homog, QQxy.one, 2) is None
    assert solve_fixed_denominator_fi(V("1", "0"), QQxy.one, 1) == R("y")
    assert solve_fixed_denominator_fi(homog, x, -1) is None


def test_darbouxian_ansatz(homog):
    X = V("1", "0")
    f = solve_darbouxian_ansatz(X, P("y*(y-1)"), 1)
    assert f == R("1/(y^2-y)")
    assert solve_darbouxian_ansatz(homog, y, 0) == R("1/y")
    # the kernel does contain 1/(x+y): D(1/(x+y)) = -1/(x+y)
    g = solve_darbouxian_ansatz(homog, x + y, 0)
    assert g == R("1/(x+y)") and darbouxian_residual(homog, g) == 0
    assert solve_darbouxian_ansatz(V("1", "x"), x + y, 0) is None


def test_rational_fi_search_examples(homog):
    assert functionally_dependent(rational_fi_search(homog, 1), R("y/x"))
    J = rational_fi_search(K3_FIELD, 6)
    assert is_rational_first_integral(K3_FIELD, J)
    assert functionally_dependent(J, R("y^3*x^3/(x+1)"))
    J = rational_fi_search(V("1", "1"), 3)
    assert functionally_dependent(J, R("y-x"))
    assert rational_fi_search(V("1", "y"), 4) is None


def test_rational_solutions_system(homog):
    c = homog.divergence_term()
    d3 = LinOpY([0, 0, 0, 1])
    sols = rational_solutions_system(homog, d3, c)
    assert len(sols) == 3
    span_check = [R("x"), R("y"), R("y^2/x")]
    assert _same_span(sols, span_check)
    sols2 = rational_solutions_system(homog, LinOpY([0, 0, 1]), c)
    assert _same_span(sols2, [R("x"), R("y")])
    X = V("1", "0")
    assert _same_span(rational_solutions_system(X, LinOpY([0, 0, 1]), 0), [R("1"), R("y")])
    assert rational_solutions_system(X, base_operator(R("1")), 0) == []


def _same_span(a, b):
    fr = [QQxy_field(f) for f in a + b]
    # compare ranks of a, b and a+b via evaluation at rational points
    pts = [(QQ(i + 2), QQ(3 * i + 1, 2 + i)) for i in range(8)]

    def rank(fs):
        rows = [[QQ.convert(f.numer.evaluate([(x, p), (y, q)]) / f.denom.evaluate([(x, p), (y, q)]))
                 for p, q in pts] for f in fs]
        return DomainMatrix(rows, (len(rows), len(pts)), QQ).rank()
    return rank(fr[:len(a)]) == rank(fr[len(a):]) == rank(fr)


def test_hyperexponential_solutions(homog):
    c = homog.divergence_term() / 2
    pairs = hyperexponential_solutions_system(homog, LinOpY([0, 0, 1]), c)
    assert (QQxy_field.zero, R("1/(2*x)")) in pairs
    X = V("1", "0")
    pairs = hyperexponential_solutions_system(X, base_operator(R("1")), 0)
    assert set(pairs) == {(R("1"), R("0")), (R("-1"), R("0"))}
    assert hyperexponential_solutions_system(X, base_operator(R("y")), 0) == []


def test_returned_solutions_satisfy_residuals(homog):
    for X, op, c in [(homog, LinOpY([0, 0, 0, 1]), homog.divergence_term()),
                     (V("1", "0"), LinOpY([0, 0, 1]), 0)]:
        for W in rational_solutions_system(X, op, c):
            assert op.apply(W) == 0 and derivation_apply(X, W) == c * W
            assert has_rational_coefficients(W)


# --- cross validation against the extactic criterion -----------------------

def _extactic_vanishes(X, n, rng):
    """``det [D^j(m_i)]`` vanishes at random points (an independent rational-FI test)."""
    mons = [x ** a * y ** b for a, b in monomials_upto(n)]
    N = len(mons)
    rows = []
    for m in mons:
        row = [m]
        for _ in range(N - 1):
            p = row[-1]
            row.append(X.A * dx(p) + X.B * dy(p))
        rows.append(row)
    for _ in range(2):
        a, b = QQ(rng.randint(-50, 50), 7), QQ(rng.randint(-50, 50), 11)
        M = [[QQ.convert(p.evaluate([(x, a), (y, b)])) for p in row] for row in rows]
        if DomainMatrix(M, (N, N), QQ).det() != 0:
            return False
    return True


def _random_poly(rng, deg):
    return QQxy.from_dict({m: QQ(rng.randint(-3, 3)) for m in monomials_upto(deg)
                           if rng.random() < 0.6} or {(0, 0): QQ(1)})


def _fields(rng, n):
    out = []
    while len(out) < n:
        kind = len(out) % 3
        if kind == 0:
            H = _random_poly(rng, 3)
            A, B = -dy(H), dx(H)
        elif kind == 1:
            Pn, Qn = _random_poly(rng, 1), _random_poly(rng, 1)
            A = -(dy(Pn) * Qn - Pn * dy(Qn))
            B = dx(Pn) * Qn - Pn * dx(Qn)
        else:
            A, B = _random_poly(rng, 2), _random_poly(rng, 2)
        if A.is_zero or B.is_zero:
            continue
        g = gcd_bivariate(A, B)
        A, B = A.exquo(g), B.exquo(g)
        if max(degree(A), degree(B)) > 2 or (A.is_ground and B.is_ground):
            continue
        out.append(VectorField(A, B))
    return out


def test_rational_fi_search_matches_extactic_oracle():
    rng = random.Random(11)
    for X in _fields(rng, 25):
        for b in (1, 2, 3):
            J = rational_fi_search(X, b)
            expected = _extactic_vanishes(X, b, rng)
            assert (J is not None) == expected, (X, b)
            if J is not None:
                assert is_rational_first_integral(X, J) and has_rational_coefficients(J)
