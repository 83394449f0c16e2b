"""Chained reduction Riccati -> Liouvillian -> Darbouxian -> Rational."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ansatz import AnsatzConfig
from .darbouxian import DarbouxianConfig, reduce_darbouxian
from .field import (
    NONE_FOUND, NOT_HANDLED, REDUCED, Darbouxian, Liouvillian, Outcome, Rational, Riccati,
    SpecError, check_rational_coefficients, verify_integral_spec,
)
from .liouvillian import LiouvillianConfig, reduce_liouvillian
from .riccati import RiccatiConfig, reduce_riccati


@dataclass
class PipelineConfig:
    seed: int = 0
    max_degree: Optional[int] = None
    torsion_cap: int = 60
    torsion_oracle: str = "builtin"
    ansatz: AnsatzConfig = field(default_factory=AnsatzConfig)

    def as_dict(self):
        return {
            "seed": self.seed,
            "max_degree": self.max_degree,
            "torsion_cap": self.torsion_cap,
            "torsion_oracle": self.torsion_oracle,
            "ansatz": {
                "max_x_degree_cap": self.ansatz.max_x_degree_cap,
                "retry_doublings": self.ansatz.retry_doublings,
                "seed": self.ansatz.seed,
            },
        }

    def riccati(self):
        return RiccatiConfig(seed=self.seed, max_degree=self.max_degree, ansatz=self.ansatz)

    def liouvillian(self):
        return LiouvillianConfig(seed=self.seed, ansatz=self.ansatz)

    def darbouxian(self):
        return DarbouxianConfig(seed=self.seed, max_degree=self.max_degree,
                                torsion_cap=self.torsion_cap,
                                use_torsion=self.torsion_oracle != "none", ansatz=self.ansatz)


@dataclass
class Stage:
    algorithm: str
    outcome: Outcome


@dataclass
class PipelineResult:
    result: str
    spec: object
    stages: list

    @property
    def reduced(self):
        return self.result == REDUCED


def _stage(spec, X, config):
    if isinstance(spec, Riccati):
        return "reduce_riccati", reduce_riccati(X, spec.F, config.riccati())
    if isinstance(spec, Liouvillian):
        return "reduce_liouvillian", reduce_liouvillian(X, spec.F, config.liouvillian())
    if isinstance(spec, Darbouxian):
        return "reduce_darbouxian", reduce_darbouxian(X, spec.k, spec.Fk, config.darbouxian())
    raise SpecError(f"no reduction for {spec!r}")


def run_pipeline(X, spec, config=None):
    """Reduce ``spec`` as far as possible.

    Stops at the first stage that does not reduce.  The overall result is
    ``NotHandled`` if that stage says so, ``Reduced`` if some stage reduced,
    else ``NoneFound``; ``spec`` is the lowest-class integral reached.
    """
    config = config or PipelineConfig()
    if not verify_integral_spec(X, spec):
        raise SpecError("the integral does not verify against the vector field")
    stages = []
    current = spec
    if isinstance(spec, Rational):
        return PipelineResult(REDUCED, spec, stages)
    while not isinstance(current, Rational):
        name, out = _stage(current, X, config)
        stages.append(Stage(name, out))
        if not out.reduced:
            break
        assert verify_integral_spec(X, out.spec)
        check_rational_coefficients(out.spec)
        assert out.spec.rank < current.rank
        current = out.spec
    last = stages[-1].outcome
    if last.result == NOT_HANDLED:
        result = NOT_HANDLED
    elif current is not spec:
        result = REDUCED
    else:
        result = NONE_FOUND
    return PipelineResult(result, current, stages)
