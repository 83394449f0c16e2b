"""Reduce the radial field (x, y) from a Riccati integral down to y/x.

The field x d/dx + y d/dy has the Riccati datum F = 0: its first integral is
a quotient of two solutions of W_yy = 0.  Each stage hands a lower-class
integral to the next one.
"""

from firstint import Riccati, VectorField, parse_poly, parse_ratfunc, run_pipeline

X = VectorField(parse_poly("x"), parse_poly("y"))
result = run_pipeline(X, Riccati(parse_ratfunc("0")))

for stage in result.stages:
    out = stage.outcome
    print(f"{stage.algorithm}: {out.result} -> {out.spec!r}")
    for entry in out.trace:
        print(f"    step {entry.step}: {entry.status}")

print("minimal class:", result.spec.name, result.spec.equations())
