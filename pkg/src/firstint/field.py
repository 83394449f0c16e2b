"""Vector fields, first-integral descriptors and verification predicates."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any, Optional, Union

from sympy.polys.fields import FracElement
from sympy.polys.rings import PolyElement

from .kernel import (
    QQxy_field, KernelError, as_frac, as_poly, dx, dy, format_ratfunc, gcd_bivariate,
    has_rational_coefficients, is_constant,
)


class SpecError(ValueError):
    """Malformed vector field or integral description."""


@dataclass(frozen=True)
class VectorField:
    """Polynomial vector field ``(A, B)``; its derivation is ``A d/dx + B d/dy``."""

    A: PolyElement
    B: PolyElement

    def __post_init__(self):
        A = as_poly(self.A)
        B = as_poly(self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if A.is_zero and B.is_zero:
            raise SpecError("zero vector field")
        if not gcd_bivariate(A, B).is_ground:
            raise SpecError("A and B share a nonconstant factor (A∧B≠1)")

    def apply(self, f):
        return derivation_apply(self, f)

    @property
    def degree(self):
        return max(max((sum(m) for m in p.itermonoms()), default=0) for p in (self.A, self.B))

    def slope(self):
        """The rational function ``B/A``."""
        if self.A.is_zero:
            raise SpecError("A = 0")
        return as_frac(self.B) / as_frac(self.A)

    def divergence_term(self):
        """``A * d/dy(B/A)``, written polynomially as ``(A B_y - B A_y)/A``."""
        A, B = self.A, self.B
        return as_frac(A * dy(B) - B * dy(A)) / as_frac(A)


# ---------------------------------------------------------------------------
# integral descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rational:
    J: FracElement
    rank = 0
    name = "rational"

    def equations(self):
        return {"J": format_ratfunc(self.J)}

    def rational_data(self):
        return [self.J]


@dataclass(frozen=True)
class Darbouxian:
    """``F**k = Fk`` where ``F`` is the y-derivative of the integral."""
    k: int
    Fk: FracElement
    rank = 1
    name = "darbouxian"

    def equations(self):
        return {"k": self.k, "Fk": format_ratfunc(self.Fk)}

    def rational_data(self):
        return [self.Fk]


@dataclass(frozen=True)
class Liouvillian:
    """``d/dy log(d/dy F) = F``."""
    F: FracElement
    rank = 2
    name = "liouvillian"

    def equations(self):
        return {"F": format_ratfunc(self.F)}

    def rational_data(self):
        return [self.F]


@dataclass(frozen=True)
class Riccati:
    """The integral is a quotient of two solutions of ``d²/dy² - F``."""
    F: FracElement
    rank = 3
    name = "riccati"

    def equations(self):
        return {"F": format_ratfunc(self.F)}

    def rational_data(self):
        return [self.F]


IntegralSpec = Union[Rational, Darbouxian, Liouvillian, Riccati]


@dataclass
class TraceEntry:
    step: str
    status: str
    data: dict = dc_field(default_factory=dict)

    def as_dict(self):
        return {"step": self.step, "status": self.status, "data": self.data}


REDUCED, NONE_FOUND, NOT_HANDLED = "Reduced", "NoneFound", "NotHandled"


@dataclass
class Outcome:
    """Result of a reduction together with its step trace."""

    result: str
    spec: Optional[Any] = None
    trace: list = dc_field(default_factory=list)

    @property
    def reduced(self):
        return self.result == REDUCED

    def log(self, step, status, **data):
        self.trace.append(TraceEntry(step, status, data))
        return self

    def __repr__(self):
        extra = f", {self.spec!r}" if self.spec is not None else ""
        return f"Outcome({self.result}{extra})"


def check_rational_coefficients(spec):
    """Assert that every rational datum of a spec has coefficients in Q."""
    for f in spec.rational_data():
        if not has_rational_coefficients(f):
            raise AssertionError(f"non-rational coefficients in {spec!r}")
    return True


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def derivation_apply(X, f):
    """``A f_x + B f_y`` as a rational function."""
    f = as_frac(f)
    return as_frac(X.A) * dx(f) + as_frac(X.B) * dy(f)


def is_rational_first_integral(X, J):
    J = as_frac(J)
    return (not is_constant(J)) and derivation_apply(X, J) == 0


def darbouxian_residual(X, f):
    """``D(f) + A d/dy(B/A) f``; zero iff ``f`` is the y-derivative of a Darbouxian integral."""
    f = as_frac(f)
    return derivation_apply(X, f) + X.divergence_term() * f


def darbouxian_power_residual(X, k, Fk):
    """``D(Fk) + k A d/dy(B/A) Fk``, the k-th power form of the residual."""
    Fk = as_frac(Fk)
    return derivation_apply(X, Fk) + k * X.divergence_term() * Fk


def liouvillian_G(X, F):
    """``G = -d/dy(B/A) - (B/A) F`` so that ``G dx + F dy`` is ``d log R``."""
    F = as_frac(F)
    s = X.slope()
    return -dy(s) - s * F


def closedness_residual(G, F):
    return dy(as_frac(G)) - dx(as_frac(F))


def functionally_dependent(J1, J2):
    J1, J2 = as_frac(J1), as_frac(J2)
    return dx(J1) * dy(J2) - dy(J1) * dx(J2) == 0


def riccati_connection(X, F):
    """Matrices ``(M1, M2)`` of the connection ``V_y = M1 V``, ``V_x = M2 V``.

    ``V = (W, W_y)`` where ``W_yy = F W`` and ``D(W) = c W`` with
    ``c = A d/dy(B/A) / 2``.
    """
    F = as_frac(F)
    A = as_frac(X.A)
    s = X.slope()
    c = X.divergence_term() / 2
    cA = c / A
    one, zero = QQxy_field.one, QQxy_field.zero
    M1 = [[zero, one], [F, zero]]
    M2 = [[cA, -s], [dy(cA) - s * F, cA - dy(s)]]
    return M1, M2


def riccati_residual(X, F):
    """Curvature ``dM1/dx - dM2/dy + M1 M2 - M2 M1`` of the Riccati connection."""
    M1, M2 = riccati_connection(X, F)
    out = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            comm = sum((M1[i][t] * M2[t][j] - M2[i][t] * M1[t][j] for t in range(2)),
                       QQxy_field.zero)
            out[i][j] = dx(M1[i][j]) - dy(M2[i][j]) + comm
    return out


def validate_spec(spec):
    if isinstance(spec, Darbouxian):
        if not isinstance(spec.k, int) or spec.k < 1:
            raise SpecError("k must be a positive integer")
        if as_frac(spec.Fk) == 0:
            raise SpecError("Fk = 0")
    elif isinstance(spec, Rational):
        if is_constant(as_frac(spec.J)):
            raise SpecError("constant rational integral")
    elif not isinstance(spec, (Liouvillian, Riccati)):
        raise SpecError(f"unknown integral spec {spec!r}")


def verify_integral_spec(X, spec):
    """Check that ``spec`` describes a first integral of ``X``."""
    validate_spec(spec)
    if isinstance(spec, Rational):
        return is_rational_first_integral(X, spec.J)
    if X.A.is_zero:
        raise SpecError("A = 0 is not supported by the y-derivative normal forms")
    if isinstance(spec, Darbouxian):
        return darbouxian_power_residual(X, spec.k, spec.Fk) == 0
    if isinstance(spec, Liouvillian):
        return closedness_residual(liouvillian_G(X, spec.F), spec.F) == 0
    return all(e == 0 for row in riccati_residual(X, spec.F) for e in row)


def class_rank(spec):
    return spec.rank


__all__ = [
    "VectorField", "Rational", "Darbouxian", "Liouvillian", "Riccati", "Outcome",
    "TraceEntry", "SpecError", "REDUCED", "NONE_FOUND", "NOT_HANDLED",
    "derivation_apply", "is_rational_first_integral", "darbouxian_residual",
    "darbouxian_power_residual", "liouvillian_G", "closedness_residual",
    "functionally_dependent", "verify_integral_spec", "riccati_residual",
    "riccati_connection", "check_rational_coefficients", "class_rank", "KernelError",
]
