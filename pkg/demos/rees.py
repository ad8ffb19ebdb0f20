"""
Filtrations, Rees modules and the conjugate deformation
=======================================================
"""

from charp import (
    FilteredModule,
    PolyMatrix,
    PolyRing,
    associated_higgs,
    cartier_splitting,
    conj_deform,
    griffiths_check,
    rees_build,
    rees_fiber,
)
from charp.connections import ConnectionData

R = PolyRing(3, ("x",))
V = FilteredModule.from_steps(3, 2, [[[1, 0]]])
r = rees_build(V)
print("Rees generators:", r)
print("fibre at t=1:", rees_fiber(r, 1))
print("fibre at t=0:", rees_fiber(r, 0))

# nabla e1 = e2 dx moves F^1 down one step
c = ConnectionData(R, 2, "dr", (PolyMatrix(R, [[0, 0], [1, 0]]),))
print("class:", griffiths_check(V, c))
print("associated Higgs field:", associated_higgs(V, c))

# deform the canonical connection by t^e zeta(F* psi) and measure the t-exponent
R = PolyRing(3, ("x", "y"))
tw = R.twisted()
higgs = [PolyMatrix.unit(tw, 2, 0, 1), PolyMatrix.unit(tw, 2, 0, 1, tw.gen(0))]
z = cartier_splitting([R.gen(0) ** 2, R.zero()])
for e in (3, 1):
    res = conj_deform(higgs, z, e)
    print(f"e={e}: psi(D1) = {res.p_curvature[0]}, measured exponent {res.measured_exponent}, "
          f"kappa {res.kappa}, in M_conj: {res.member}")
