"""Reduction of a Liouvillian first integral to a rational or Darbouxian one.

The input is ``F`` with ``d/dy log(d/dy I) = F`` for a Liouvillian first
integral ``I`` of ``X``.  The closed form ``G dx + F dy`` is the logarithmic
differential of ``d/dy I``; the search runs through the exponential part,
the rational part, the logarithmic part over Q and finally a second-order
linear system for the remaining case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from sympy import QQ

from .ansatz import (
    AnsatzConfig, rational_solutions_system, solve_darbouxian_ansatz,
    solve_fixed_denominator_fi,
)
from .field import (
    NONE_FOUND, REDUCED, Darbouxian, Liouvillian, Outcome, Rational, SpecError,
    check_rational_coefficients, closedness_residual, liouvillian_G,
    verify_integral_spec,
)
from .kernel import (
    as_frac, degree, dy, lcm_poly, num_den, rational_roots, squarefree_part,
)
from .linop import LinOpY
from .oneform import (
    FormError, check_log_derivative, liouvillian_residue_resultant, log_part_reconstruction,
)


@dataclass
class LiouvillianConfig:
    seed: int = 0
    eps_attempts: int = 8
    ansatz: Optional[AnsatzConfig] = None


def step1_bound(F, G):
    """``(Qt, bound)`` for the exponential-part search.

    ``bound`` is ``1 + max(deg F*Qt, deg G*Qt) - deg sf(Qt)`` for numerators
    over ``P/(Qt/sf(Qt))``; the search itself runs over ``P'/Qt`` with
    ``deg P' <= bound + deg sf(Qt)``, a space containing the former.
    """
    Qt = lcm_poly(num_den(as_frac(F))[1], num_den(as_frac(G))[1])
    sf = squarefree_part(Qt)
    degs = [degree(num_den(as_frac(h) * as_frac(Qt))[0]) for h in (F, G) if as_frac(h) != 0]
    bound = 1 + max(degs, default=0) - degree(sf)
    return Qt, bound


def draw_eps(rng):
    return QQ(rng.randint(1, 60), rng.randint(1, 7))


def shear_generic(d, eps):
    """The lines of slope ``eps`` meet ``d = 0`` in ``deg d`` finite points."""
    top = degree(d)
    lead = sum((c * eps ** m[0] for m, c in d.iterterms() if sum(m) == top), QQ.zero)
    return lead != 0


def liouvillian_step3(X, F, G, eps, seed=0, trace=None):
    """Logarithmic part with rational residues, as a Darbouxian spec or None."""
    F, G = as_frac(F), as_frac(G)
    if closedness_residual(G, F) != 0:
        raise SpecError("G dx + F dy is not closed")
    out = trace if trace is not None else []
    eps = QQ.convert(eps)
    Ft = F + eps * G
    n, d = num_den(Ft)
    if n.is_zero:
        out.append(("step3", "step-3 precondition failed", {"reason": "zero form"}))
        return None
    if degree(squarefree_part(d)) != degree(d):
        out.append(("step3", "step-3 precondition failed", {"reason": "multiple pole"}))
        return None
    if degree(n) >= degree(d):
        out.append(("step3", "step-3 precondition failed", {"reason": "deg num >= deg den"}))
        return None
    if not shear_generic(d, eps):
        out.append(("step3", "step-3 precondition failed", {"reason": "non-generic slope"}))
        return None
    S = liouvillian_residue_resultant(Ft, eps)
    if any(m[0] or m[1] for m in S.monoms()):
        out.append(("step3", "residues depend on the line", {}))
        return None
    roots, all_rational = rational_roots(S)
    if not all_rational:
        out.append(("step3", "irrational residues", {}))
        return None
    try:
        k, Rk = log_part_reconstruction(Ft, [r for r, _ in roots], eps)
    except FormError as exc:
        out.append(("step3", "reconstruction failed", {"reason": str(exc)}))
        return None
    if not check_log_derivative(k, Rk, F, G):
        out.append(("step3", "log-derivative check failed", {}))
        return None
    return Darbouxian(k, Rk)


def step3_with_eps(X, F, G, config, trace):
    """Step 3 over freshly drawn slopes until one is generic."""
    rng = random.Random(config.seed)
    for _ in range(config.eps_attempts):
        eps = draw_eps(rng)
        local = []
        spec = liouvillian_step3(X, F, G, eps, trace=local)
        trace.extend(local)
        if spec is not None:
            return spec, eps
        if not any(e[2].get("reason") == "non-generic slope" for e in local):
            return None, eps
    return None, None


def reduce_liouvillian(X, F, config=None):
    """Lower-class first integral from a Liouvillian one, as an ``Outcome``."""
    config = config or LiouvillianConfig()
    F = as_frac(F)
    if not verify_integral_spec(X, Liouvillian(F)):
        raise SpecError("F does not describe a Liouvillian first integral of X")
    G = liouvillian_G(X, F)
    out = Outcome(NONE_FOUND)
    sub = []

    Q, bound = step1_bound(F, G)
    if bound < 0:
        out.log("1", "negative degree bound", bound=bound)
    else:
        J = solve_fixed_denominator_fi(X, Q, bound + degree(squarefree_part(Q)))
        if J is not None:
            return _finish(X, out.log("1", "found", bound=bound), Rational(J))
        out.log("1", "not found", bound=bound)

    Qd = squarefree_part(num_den(F)[1])
    f = solve_darbouxian_ansatz(X, Qd, degree(Qd) - 1)
    if f is not None:
        return _finish(X, out.log("2", "found"), Darbouxian(1, f))
    out.log("2", "not found", bound=degree(Qd) - 1)

    spec, eps = step3_with_eps(X, F, G, config, sub)
    data = {"eps": str(eps), "notes": [e[1] for e in sub]}
    if spec is not None:
        return _finish(X, out.log("3", "found", **data), spec)
    out.log("3", "not found", **data)

    op = LinOpY([dy(F), F, 1])
    c = -(as_frac(X.A) * G + as_frac(X.B) * F)
    notes = []
    sols = rational_solutions_system(X, op, c, config.ansatz, notes)
    if sols:
        if len(sols) > 1:
            out.log("4", "warning: more than one solution up to scalar", count=len(sols))
        W = sols[0]
        return _finish(X, out.log("4", "found"), Darbouxian(1, F + dy(W) / W))
    out.log("4", "not found", notes=[n[1] for n in notes])
    return out.log("5", "none found")


def _finish(X, out, spec):
    assert verify_integral_spec(X, spec)
    check_rational_coefficients(spec)
    out.result = REDUCED
    out.spec = spec
    return out
