"""
Differential operators in characteristic p
==========================================

Normal forms, the pairing with divided powers, and p-curvature of derivations.
"""

from charp import DiffOp, PDElement, PolyRing, pair, pd_taylor
from charp.diffops import Derivation, p_curvature_derivation

R = PolyRing(3, ("x",))
x = R.gen(0)
d = DiffOp.d(R, 0)

# moving d past a function picks up its derivative
print("d x       =", d * DiffOp.function(x))
print("d^2 x     =", d ** 2 * DiffOp.function(x))

# d^p commutes with every function
print("d^3 x     =", d ** 3 * DiffOp.function(x))

# tau^[k] and d^a are dual bases
print("<tau^[2], d^2> =", pair(PDElement.monomial(R, (2,), 2), DiffOp.d(R, 0, 2)))
print("<taylor(x^4), d^2> =", pair(pd_taylor(x ** 4, 4), DiffOp.d(R, 0, 2)), "= d^2(x^4)")

# psi(D) = D^p - D^(o p) is O-linear; for the Euler field it is x^p d^p
for p in (2, 3, 5, 7):
    Rp = PolyRing(p, ("x",))
    euler = Derivation(Rp, [Rp.gen(0)])
    print(f"p={p}: psi(x d) =", p_curvature_derivation(euler))
