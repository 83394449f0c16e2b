"""Torsion on an elliptic curve and the 2-Darbouxian branch.

On y^2 = x^3 - x the divisor (0,0) - infinity has order 2: twice it is the
divisor of x.  The same mechanism recovers y/x from the 2-Darbouxian datum
F^2 = x / (y (y - x)^2), the pullback of dt / ((t - 1) sqrt t) by t = y/x.
"""

from firstint import VectorField, parse_poly, parse_ratfunc
from firstint.darbouxian import darbouxian_k2_branch
from firstint.superelliptic import INF, HyperDivisor, QQx, X, function_with_divisor, torsion_order_default

D = HyperDivisor.make(X ** 3 - X, [(X, QQx.zero, 1), (INF, 0, -1)])
print("torsion order:", torsion_order_default(D, cap=20))
h = function_with_divisor(D, 2)
print("witness U1 + U2 w over W:", h.U1, h.U2, h.W)

field = VectorField(parse_poly("x"), parse_poly("y"))
out = darbouxian_k2_branch(field, parse_ratfunc("x/(y*(y-x)^2)"))
for entry in out.trace:
    print(f"step {entry.step}: {entry.status}")
print("J =", out.spec.equations()["J"])
