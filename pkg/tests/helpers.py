"""Shared constructors for the test suites."""

from firstint.field import VectorField
from firstint.kernel import parse_poly, parse_ratfunc


def P(text):
    return parse_poly(text)


def R(text):
    return parse_ratfunc(text)


def V(a, b):
    return VectorField(P(a), P(b))
