"""
Connections, curvature and p-curvature
======================================

A rank-one example with nonzero p-curvature, a gauge-flat rank-two example,
horizontal vector fields, and the Taylor stratification.
"""

from charp import (
    ConnectionData,
    PolyMatrix,
    PolyRing,
    bracket_closure,
    gauge_transform,
    horizontal_fields,
    p_curvature,
    p_power_closure,
    taylor_stratification,
)

R = PolyRing(2, ("x",))
c = ConnectionData(R, 1, "dr", (PolyMatrix(R, [[R.gen(0)]]),))
print("psi(d) for d + x:", p_curvature(c)[0])
h = horizontal_fields(c)
print("horizontal field:", h.fields[0])
print("closed under p-th powers:", p_power_closure(h))

# gauge the trivial connection by S; the result is flat with zero p-curvature
R = PolyRing(3, ("x", "y"))
x, y = R.gen(0), R.gen(1)
S = PolyMatrix(R, [[1, x * y], [0, 1]])
g = gauge_transform(ConnectionData.trivial(R, 2), S)
print("A1 =", g.matrices[0], " A2 =", g.matrices[1])
print("psi =", [str(m) for m in p_curvature(g)])
print("bracket closed:", bracket_closure(horizontal_fields(g)))

# the stratification reduces to the identity mod I exactly when psi = 0
s = taylor_stratification(g, 3)
print("epsilon[1,2] =", s.entry(0, 1))
print("identity mod I:", s.quotient_is_identity())
