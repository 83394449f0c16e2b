"""A 3-Darbouxian first integral that is a function of a rational one.

For X = 3x(x+1) d/dx - y(2x+3) d/dy the derivative F = dI/dy satisfies
F^3 in Q(x, y).  The reduction finds the rational first integral
x^3 y^3 / (x + 1), of which I is a superelliptic pullback.
"""

from firstint import (
    VectorField, functionally_dependent, parse_poly, parse_ratfunc, reduce_darbouxian,
)

X = VectorField(parse_poly("3*x*(x+1)"), parse_poly("-y*(2*x+3)"))
Fk = parse_ratfunc("-54*x^3*(x+1)^3/((2*y^3*x^3+2*x+2)^2*(x+1)^2)")

out = reduce_darbouxian(X, 3, Fk)
for entry in out.trace:
    print(f"step {entry.step}: {entry.status} {entry.data}")
print("J =", out.spec.equations()["J"])
print("dependent with x^3 y^3/(x+1):",
      functionally_dependent(out.spec.J, parse_ratfunc("x^3*y^3/(x+1)")))
