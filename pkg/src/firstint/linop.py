"""Linear differential operators in d/dy with coefficients in Q(x, y)."""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import QQxy_field, as_frac, dy


@dataclass(frozen=True)
class LinOpY:
    """``sum(c[i] * d^i/dy^i)`` with ``c[-1] != 0``."""

    coefficients: tuple

    def __init__(self, coefficients):
        cs = tuple(as_frac(c) for c in coefficients)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if len(cs) < 2:
            raise ValueError("operator order must be at least 1")
        object.__setattr__(self, "coefficients", cs)

    @property
    def order(self):
        return len(self.coefficients) - 1

    def monic(self):
        lc = self.coefficients[-1]
        return LinOpY([c / lc for c in self.coefficients])

    def apply(self, f):
        f = as_frac(f)
        acc = QQxy_field.zero
        d = f
        for i, c in enumerate(self.coefficients):
            if i:
                d = dy(d)
            if c != 0:
                acc += c * d
        return acc

    __call__ = apply

    def __eq__(self, other):
        return isinstance(other, LinOpY) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return "LinOpY(" + ", ".join(str(c) for c in self.coefficients) + ")"


def base_operator(F):
    """``d²/dy² - F``."""
    F = as_frac(F)
    return LinOpY([-F, QQxy_field.zero, QQxy_field.one])
