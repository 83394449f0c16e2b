"""The Lins Neto family: a 6-Darbouxian integral without poles.

The radical form has no poles (the denominator is S^(5/6) with a quartic S),
so logarithmic data give nothing and the integral may be an elliptic pullback.
Under a degree cap below the first rational integral, the reduction stops
at the not-handled predicate.  Without the cap, the rational integral of
degree 12 is found.
"""

import time

from firstint import (
    DarbouxianConfig, VectorField, not_handled_predicate, parse_poly, reduce_darbouxian,
)
from firstint.kernel import as_frac, degree, num_den
from firstint.oneform import make_oneform, restrict_to_line

A = parse_poly("-9*x^2-12*x*y+y^2+4*x+6*y")
X = VectorField(A, parse_poly("9*x^2-12*x*y-9*y^2+6*y"))
S = parse_poly("9*x^4+6*x^2*y^2+y^4-4*x^3-12*x*y^2+4*y^2")
Fk = as_frac(A) ** 6 / as_frac(S) ** 5

L = restrict_to_line(make_oneform(X, Fk, 6), 1, 1)
print("predicate on the line through (1, 1):", not_handled_predicate(L, 6))

for cap in (10, None):
    t0 = time.perf_counter()
    out = reduce_darbouxian(X, 6, Fk, DarbouxianConfig(max_degree=cap))
    print(f"max_degree={cap}: {out.result} after {time.perf_counter() - t0:.1f} s,",
          "steps", [e.step for e in out.trace])
    if out.reduced:
        print("    J has degree", max(degree(p) for p in num_den(out.spec.J)))
