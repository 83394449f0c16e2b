"""Reduction of symbolic first integrals of planar polynomial vector fields.

Given ``X = (A, B)`` with a Riccati, Liouvillian or Darbouxian first integral
described by rational data, the reductions return a first integral of a
lower class when one exists.
"""

from .darbouxian import (
    DarbouxianConfig, alpha_trace, darbouxian_bounds, darbouxian_k2_branch, k1_log_assembly,
    not_handled_predicate, rationalize_newton_sums, reduce_darbouxian,
)
from .field import (
    NONE_FOUND, NOT_HANDLED, REDUCED, Darbouxian, Liouvillian, Outcome, Rational, Riccati,
    SpecError, VectorField, derivation_apply, functionally_dependent, verify_integral_spec,
)
from .kernel import format_ratfunc, parse_poly, parse_ratfunc
from .liouvillian import LiouvillianConfig, reduce_liouvillian
from .pipeline import PipelineConfig, run_pipeline
from .riccati import RiccatiConfig, reduce_riccati

__version__ = "0.1.0"

__all__ = [
    "VectorField", "Rational", "Darbouxian", "Liouvillian", "Riccati", "Outcome",
    "REDUCED", "NONE_FOUND", "NOT_HANDLED", "SpecError",
    "derivation_apply", "functionally_dependent", "verify_integral_spec",
    "parse_poly", "parse_ratfunc", "format_ratfunc",
    "reduce_riccati", "RiccatiConfig", "reduce_liouvillian", "LiouvillianConfig",
    "reduce_darbouxian", "DarbouxianConfig", "k1_log_assembly", "alpha_trace",
    "rationalize_newton_sums", "not_handled_predicate", "darbouxian_k2_branch",
    "darbouxian_bounds", "run_pipeline", "PipelineConfig",
]
