"""Symmetric powers in d/dy and the reduction of Riccati first integrals.

A Riccati first integral is a quotient of two solutions of
``W_yy = F W`` completed by ``D(W) = (1/2) A d/dy(B/A) W``.  The reduction
follows the Kovacic/Ulmer case analysis on this system: rational and
hyperexponential solutions, invariants of the symmetric powers of orders
2, 4, 6, 8, 12, then a Darbouxian and a degree-bounded rational search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ansatz import (
    AnsatzConfig, hyperexponential_solutions_system, rational_fi_search,
    rational_solutions_system, solve_darbouxian_ansatz,
)
from .darbouxian import riccati_step7_bound
from .field import (
    NONE_FOUND, REDUCED, Darbouxian, Liouvillian, Outcome, Rational, Riccati,
    SpecError, check_rational_coefficients, derivation_apply, verify_integral_spec,
)
from .kernel import (
    QQxy_field, as_frac, degree, dy, is_constant, num_den, squarefree_part,
)
from .kovacic import frac_sqrt
from .linop import LinOpY, base_operator


@dataclass
class RiccatiSystem:
    """``op(W) = 0`` together with ``D(W) = x_constraint * W``."""

    op: LinOpY
    x_constraint: object


@dataclass
class RiccatiConfig:
    seed: int = 0
    max_degree: Optional[int] = None
    ansatz: AnsatzConfig = field(default_factory=AnsatzConfig)
    primitive_orders: tuple = (6, 8, 12)


# ---------------------------------------------------------------------------
# operator algebra
# ---------------------------------------------------------------------------

def _d_left(cs):
    """Coefficients of ``d/dy * L`` for ``L = sum cs[i] d^i``."""
    out = [QQxy_field.zero] * (len(cs) + 1)
    for i, c in enumerate(cs):
        out[i] += dy(c)
        out[i + 1] += c
    return out


def _add(a, b):
    n = max(len(a), len(b))
    a = list(a) + [QQxy_field.zero] * (n - len(a))
    b = list(b) + [QQxy_field.zero] * (n - len(b))
    return [u + v for u, v in zip(a, b)]


def _scale(c, a):
    return [c * u for u in a]


def symmetric_power_op(op, m):
    """The m-th symmetric power of ``d²/dy² - F`` (monic, order ``m + 1``).

    Recurrence ``L_0 = 1``, ``L_1 = d``, ``L_{i+1} = d L_i - i (m - i + 1) F L_{i-1}``;
    ``L_{m+1}`` annihilates the products of m solutions.
    """
    opm = op.monic()
    if opm.order != 2 or opm.coefficients[1] != 0:
        raise ValueError("symmetric powers are implemented for d²/dy² - F")
    if m < 1:
        raise ValueError("m must be positive")
    F = -opm.coefficients[0]
    prev, cur = [QQxy_field.one], [QQxy_field.zero, QQxy_field.one]
    for i in range(1, m + 1):
        prev, cur = cur, _add(_d_left(cur), _scale(-i * (m - i + 1) * F, prev))
    return LinOpY(cur)


def symmetric_power_system(X, F, m):
    """The m-th symmetric power of the completed system."""
    op = symmetric_power_op(base_operator(F), m)
    return RiccatiSystem(op, X.divergence_term() * m / 2)


def gauge_twist(op, R, m):
    """``op ⊗ (d/dy + R_y/(m R))``: solutions are those of ``op`` times ``R^(-1/m)``.

    Returns the monic order-2 operator ``d² + a1 d + a0``.
    """
    R = as_frac(R)
    if R == 0:
        raise ValueError("R = 0")
    opm = op.monic()
    if opm.order != 2:
        raise ValueError("gauge twist is implemented for order 2")
    b0, b1 = opm.coefficients[0], opm.coefficients[1]
    psi = -dy(R) / (m * R)
    a1 = b1 - 2 * psi
    a0 = psi ** 2 - dy(psi) - b1 * psi + b0
    return LinOpY([a0, a1, QQxy_field.one])


def special_polynomial(F, R):
    """``(b1, b0)`` of ``u² + b1 u + b0`` attached to a symmetric-square solution R."""
    F, R = as_frac(F), as_frac(R)
    if R == 0:
        raise ValueError("R = 0")
    R1 = dy(R)
    R2 = dy(R1)
    assert dy(R2) == 4 * F * R1 + 2 * dy(F) * R, "R does not solve the symmetric square"
    return -R1 / R, R2 / (2 * R) - F


def special_polynomial_sym4(F, R):
    """``(b1, b0)`` with ``(u² + b1 u + b0)²`` attached to a fourth-power invariant R.

    ``R = (y1 y2)²`` for the two exponential solutions, so ``b1 = -R_y/(2R)``;
    the Riccati equations of the roots give ``b0 = (b1² - b1_y - 2F)/2``.
    """
    F, R = as_frac(F), as_frac(R)
    b1 = -dy(R) / (2 * R)
    b0 = (b1 ** 2 - dy(b1) - 2 * F) / 2
    return b1, b0


def discriminant(b1, b0):
    return b1 ** 2 - 4 * b0


def schwarzian_y(f):
    """``f'''/f' - (3/2)(f''/f')²`` in y."""
    f = as_frac(f)
    f1 = dy(f)
    if f1 == 0:
        raise ValueError("constant in y")
    f2 = dy(f1)
    f3 = dy(f2)
    return f3 / f1 - as_frac(3) / 2 * (f2 / f1) ** 2


def dominant_coefficient(f):
    """Ratio of the graded-lex leading coefficients of numerator and denominator."""
    n, d = num_den(as_frac(f))
    return n.LC / d.LC


# ---------------------------------------------------------------------------
# the reduction
# ---------------------------------------------------------------------------

def _solutions(X, system, config, out, step):
    notes = []
    sols = rational_solutions_system(X, system.op, system.x_constraint, config.ansatz, notes)
    out.log(step, "rational solutions", count=len(sols), notes=[n[1] for n in notes])
    return sols


def _pick_square_solution(F, sols):
    """First symmetric-square solution with a double special root, else the first."""
    for R in sols:
        b1, b0 = special_polynomial(F, R)
        if discriminant(b1, b0) == 0:
            return R
    return sols[0]


def _darbouxian_from_square(delta):
    """``d/dy F = sqrt(delta)`` as a 1- or 2-Darbouxian spec with rational data."""
    delta = delta / dominant_coefficient(delta)
    root = frac_sqrt(delta)
    if root is not None:
        return Darbouxian(1, root)
    return Darbouxian(2, delta)


def reduce_riccati(X, F, config=None):
    """Lower-class first integral from a Riccati one, as an ``Outcome``."""
    config = config or RiccatiConfig()
    F = as_frac(F)
    if not verify_integral_spec(X, Riccati(F)):
        raise SpecError("F does not describe a Riccati first integral of X")
    out = Outcome(NONE_FOUND)
    c = X.divergence_term() / 2

    sols = _solutions(X, RiccatiSystem(base_operator(F), c), config, out, "1")
    if sols:
        R = sols[0]
        return _finish(X, out, "1", Darbouxian(1, 1 / R ** 2))

    sols = _solutions(X, symmetric_power_system(X, F, 2), config, out, "2")
    if sols:
        R = _pick_square_solution(F, sols)
        b1, b0 = special_polynomial(F, R)
        delta = discriminant(b1, b0)
        if delta == 0:
            return _finish(X, out, "2a", Liouvillian(b1))
        return _finish(X, out, "2b", _darbouxian_from_square(delta))

    notes = []
    hyp = hyperexponential_solutions_system(X, base_operator(F), c, config.seed, notes)
    out.log("3", "hyperexponential solutions", count=len(hyp), notes=[n[1] for n in notes])
    if hyp:
        u, _ = hyp[0]
        return _finish(X, out, "3", Liouvillian(-2 * u))

    sols = _solutions(X, symmetric_power_system(X, F, 4), config, out, "4")
    if len(sols) == 1:
        b1, b0 = special_polynomial_sym4(F, sols[0])
        spec = _darbouxian_from_square(discriminant(b1, b0))
        if verify_integral_spec(X, spec):
            return _finish(X, out, "4", spec)
        out.log("4", "inconclusive")

    for m in config.primitive_orders:
        sols = _solutions(X, symmetric_power_system(X, F, m), config, out, f"5(m={m})")
        for R in sols:
            tw = gauge_twist(base_operator(F), R, m)
            a0, a1 = tw.coefficients[0], tw.coefficients[1]
            if a0 == 0:
                continue
            g = 2 * a1 + dy(a0) / a0
            J = g ** 2 / a0
            if not is_constant(J) and derivation_apply(X, J) == 0:
                return _finish(X, out, "5", Rational(J))
            out.log("5", "invariant does not give a first integral", m=m)

    Q = squarefree_part(num_den(F)[1])
    f = solve_darbouxian_ansatz(X, Q, degree(Q) - 1)
    if f is not None:
        return _finish(X, out, "6", Darbouxian(1, f))
    out.log("6", "not found", bound=degree(Q) - 1)

    n, d = num_den(F)
    Q7 = squarefree_part(d * X.A)
    bound = riccati_step7_bound(degree(Q7), degree(n) if not n.is_zero else 0, degree(d))
    if config.max_degree is not None and config.max_degree < bound:
        out.log("7", "degree bound capped", bound=bound, cap=config.max_degree)
        bound = config.max_degree
    notes = []
    J = rational_fi_search(X, bound, config.ansatz, notes)
    if J is not None:
        return _finish(X, out, "7", Rational(J))
    out.log("7", "not found", bound=bound, notes=[n_[1] for n_ in notes])
    return out.log("8", "none found")


def _finish(X, out, step, spec):
    assert verify_integral_spec(X, spec)
    check_rational_coefficients(spec)
    out.log(step, "found", spec=spec.name)
    out.result = REDUCED
    out.spec = spec
    return out
