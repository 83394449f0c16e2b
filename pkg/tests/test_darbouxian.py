import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy import QQ
from sympy.polys.rings import ring

from firstint.darbouxian import (
    DarbouxianConfig, alpha_trace, darbouxian_bounds, darbouxian_k2_branch, k1_log_assembly,
    minimal_radical, not_handled_predicate, rationalize_newton_sums, reduce_darbouxian,
    step6_bound,
)
from firstint.field import (
    NONE_FOUND, NOT_HANDLED, REDUCED, Darbouxian, Rational, SpecError, VectorField,
    derivation_apply, functionally_dependent, verify_integral_spec,
)
from firstint.kernel import (
    QQxy, as_frac, dx, dy, gcd_bivariate, has_rational_coefficients, is_constant, x, y,
)
from firstint.oneform import LineRestriction, QQxz, lx, make_oneform, restrict_to_line
from firstint.superelliptic import TorsionOracle
from helpers import P, R, V

K3_FIELD = V("3*x*(x+1)", "-y*(2*x+3)")
K3_FK = R("-54*x^3*(x+1)^3/((2*y^3*x^3+2*x+2)^2*(x+1)^2)")
LN_A = "-9*x^2-12*x*y+y^2+4*x+6*y"
LN_S = "9*x^4+6*x^2*y^2+y^4-4*x^3-12*x*y^2+4*y^2"
LINS_NETO = V(LN_A, "9*x^2-12*x*y-9*y^2+6*y")
LN_FK = as_frac(P(LN_A)) ** 6 / as_frac(P(LN_S)) ** 5
K2_FK = R("x/(y*(y-x)^2)")


class ZeroOracle(TorsionOracle):
    def order(self, div):
        return 0


def steps(out):
    return [e.step for e in out.trace]


# --- the orchestrator ------------------------------------------------------

def test_exact_form_at_step1():
    out = reduce_darbouxian(V("1", "1"), 1, R("1"))
    assert out.spec == Rational(R("y-x")) and steps(out) == ["1"]


def test_k3_pullback_example():
    out = reduce_darbouxian(K3_FIELD, 3, K3_FK)
    assert isinstance(out.spec, Rational)
    assert functionally_dependent(out.spec.J, R("y^3*x^3/(x+1)"))
    assert out.trace[-1].step == "5"


def test_lins_neto_capped_is_not_handled():
    out = reduce_darbouxian(LINS_NETO, 6, LN_FK, DarbouxianConfig(max_degree=10))
    assert out.result == NOT_HANDLED
    pred = [e for e in out.trace if e.step == "7"]
    assert pred and pred[0].data["value"] is True


def test_k1_quadratic_residues():
    X = V("x", "y")
    out = reduce_darbouxian(X, 1, R("4*x/(y^2-2*x^2)"))
    assert out.reduced and functionally_dependent(out.spec.J, R("y/x"))


def test_k1_irrational_mixing_gives_none():
    X = V("4*x*(x+1)", "2*x^2+4*x*y-y^2+4*y")
    Fk = R("4*x/(y^2-2*x^2)")
    assert verify_integral_spec(X, Darbouxian(1, Fk))
    out = reduce_darbouxian(X, 1, Fk)
    assert out.result == NONE_FOUND


def test_invalid_spec_rejected(homog):
    with pytest.raises(SpecError):
        reduce_darbouxian(homog, 1, R("x"))


def test_minimal_radical():
    assert minimal_radical(R("1/y^2"), 2) == (1, R("1/y"))
    k, _ = minimal_radical(R("1/(y^2+1)^2"), 4)
    assert k == 2
    assert minimal_radical(K3_FK, 3)[0] == 3


# --- the k = 1 logarithmic assembly ---------------------------------------

def test_k1_log_assembly_examples(homog):
    w = make_oneform(homog, R("1/y"), 1)
    trace = []
    assert k1_log_assembly(homog, w, 1, 2, trace=trace) == R("y/x")
    ex = {s: d for s, m, d in trace if m == "exponents"}
    assert sorted(ex["3d"]["t"]) == ["-1", "1"] and ex["3d"]["d"] == 1
    X = V("1", "-2*x")
    J = k1_log_assembly(X, make_oneform(X, R("1/(x^2+y)"), 1), 1, 1)
    assert functionally_dependent(J, R("x^2+y"))
    Xn = V("4*x*(x+1)", "2*x^2+4*x*y-y^2+4*y")
    trace = []
    assert k1_log_assembly(Xn, make_oneform(Xn, R("4*x/(y^2-2*x^2)"), 1), 1, 1,
                           trace=trace) is None
    assert trace[-1][1] == "D(H) != 0"


def field_of(J):
    """A polynomial field with rational first integral ``J``."""
    A, B = dy(J) * as_frac(J.denom) ** 2, -dx(J) * as_frac(J.denom) ** 2
    A, B = A.numer.quo_ground(A.denom.LC), B.numer.quo_ground(B.denom.LC)
    g = gcd_bivariate(A, B)
    return VectorField(A.exquo(g), B.exquo(g))


def forward_cases(rng, n):
    def lin():
        return QQxy.from_dict({(1, 0): QQ(rng.randint(-2, 2)), (0, 1): QQ(rng.choice([1, -1, 2])),
                               (0, 0): QQ(rng.randint(-3, 3))})
    out = []
    while len(out) < n:
        kind = rng.randint(0, 2)
        if kind == 0:
            J = as_frac(lin()) / as_frac(lin())
        elif kind == 1:
            J = as_frac(QQxy.from_dict({(2, 0): QQ(rng.choice([1, -1])), (0, 1): QQ(1),
                                        (1, 0): QQ(rng.randint(-2, 2))}))
        else:
            J = as_frac(x * y + rng.randint(1, 3)) / as_frac(lin())
        if is_constant(J) or dy(J) == 0:
            continue
        F = as_frac(0)
        for a in rng.sample([0, 1, -1, 2, -2, 3], rng.randint(1, 2)):
            F += QQ(rng.choice([1, -1, 2, 3]), rng.choice([1, 1, 2])) * dy(J) / (J - a)
        if F != 0:
            out.append((field_of(J), F, J))
    return out


def test_k1_branch_agreement_on_forward_inputs():
    for X, F, J in forward_cases(random.Random(3), 15):
        out = reduce_darbouxian(X, 1, F)
        assert out.reduced and out.trace[-1].step == "3"
        assert functionally_dependent(out.spec.J, J)
        assert has_rational_coefficients(out.spec.J)


# --- alpha-traces and Newton sums ------------------------------------------

def test_alpha_trace_examples():
    r2 = sympy.sqrt(2)
    assert alpha_trace(r2, r2) == 1
    assert alpha_trace(3, 1) == 3
    assert alpha_trace(1 + 2 * r2, r2) == 2
    assert alpha_trace(r2 + 5, 2) == 5


def test_newton_sums_examples():
    K = QQ.algebraic_field(sympy.sqrt(2))
    RK, X_, Y_ = ring("x,y", K)
    FK = RK.to_field()
    a = K.convert(sympy.sqrt(2))
    J = FK(a * Y_) / FK(X_)
    assert rationalize_newton_sums(J, K) == R("4*y/x")
    J2 = FK(X_ + a) / FK(X_ - a)
    S = rationalize_newton_sums(J2, K)
    assert not is_constant(S) and has_rational_coefficients(S)
    assert rationalize_newton_sums(R("y/x")) == R("y/x")


# --- bounds and the predicate ----------------------------------------------

def test_bounds_examples():
    assert darbouxian_bounds(3, 0, 7).step6 == 7
    assert darbouxian_bounds(2, deg_sf_SQ=4).step5 == 18
    assert darbouxian_bounds(1, riccati=(2, 3, 2)).riccati_step7 == 6
    with pytest.raises(ValueError, match="bound undefined for k=2"):
        step6_bound(2, 1, 1)


def test_not_handled_predicate_examples():
    w = make_oneform(LINS_NETO, LN_FK, 6)
    L = restrict_to_line(w, 1, 1)
    assert not_handled_predicate(L, 6)
    assert not not_handled_predicate(L, 5)
    L2 = LineRestriction(0, 0, 0, QQxz.one, lx - 1, lx ** 3 + 1, 2)
    assert not not_handled_predicate(L2, 2)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 6]), st.integers(0, 4), st.integers(0, 8),
       st.fractions(min_value=-5, max_value=5).filter(lambda q: q != 0),
       st.fractions(min_value=-5, max_value=5).filter(lambda q: q != 0),
       st.fractions(min_value=-5, max_value=5).filter(lambda q: q != 0))
def test_predicate_invariant_under_scaling(k, dP, dS, a, b, c):
    Pp, Sp = lx ** dP + 1, lx ** dS + 2
    base = LineRestriction(0, 0, 0, Pp, QQxz.one, Sp, k)
    scaled = LineRestriction(0, 0, 0, Pp * QQ(a), QQxz(QQ(b)), Sp * QQ(c), k)
    assert not_handled_predicate(base, k) == not_handled_predicate(scaled, k)


# --- the k = 2 branch -----------------------------------------------------

def test_k2_branch_forward_input(homog):
    assert verify_integral_spec(homog, Darbouxian(2, K2_FK))
    out = darbouxian_k2_branch(homog, K2_FK)
    assert out.result == REDUCED
    assert derivation_apply(homog, out.spec.J) == 0 and not is_constant(out.spec.J)
    assert [e.step for e in out.trace] == ["8c", "8d", "8e", "8f", "8g"]


def test_k2_branch_residue_obstruction():
    # residues 1 at y = 1 and sqrt(3) at y = 3 share no common scale
    out = darbouxian_k2_branch(V("1", "0"), R("(4*y-6)^2/((y-1)^2*(y-3)^2*y)"))
    assert out.result == NONE_FOUND and out.trace[-1].step == "8c"


def test_k2_branch_zero_oracle(homog):
    out = darbouxian_k2_branch(homog, K2_FK, torsion=ZeroOracle())
    assert out.result == NONE_FOUND and out.trace[-1].step == "8f"


def test_full_reduction_of_k2_input(homog):
    out = reduce_darbouxian(homog, 2, K2_FK)
    assert out.reduced and functionally_dependent(out.spec.J, R("y/x"))


# --- invariants -----------------------------------------------------------

def test_soundness_and_step_order():
    order = ["0", "1", "2", "3a", "3", "4", "5", "6", "7", "8"]
    cases = [(V("1", "1"), 1, R("1")), (V("x", "y"), 1, R("1/y")), (K3_FIELD, 3, K3_FK),
             (V("1", "-2*x"), 1, R("1/(x^2+y)")), (V("x", "y"), 2, K2_FK)]
    for X, k, Fk in cases:
        a = reduce_darbouxian(X, k, Fk, DarbouxianConfig(seed=5))
        b = reduce_darbouxian(X, k, Fk, DarbouxianConfig(seed=5))
        assert [e.as_dict() for e in a.trace] == [e.as_dict() for e in b.trace]
        top = [e.step for e in a.trace if e.step in order]
        assert top == sorted(top, key=order.index)
        if a.reduced:
            assert derivation_apply(X, a.spec.J) == 0
            assert has_rational_coefficients(a.spec.J)
