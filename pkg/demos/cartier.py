"""
Cartier operator, splittings and descent
========================================
"""

from charp import (
    ConnectionData,
    OneForm,
    PolyMatrix,
    PolyRing,
    cartier_descend,
    cartier_operator,
    cartier_splitting,
    gauge_transform,
    theta_coalgebra_check,
)

R = PolyRing(3, ("x", "y"))
x, y = R.gen(0), R.gen(1)

for w in (OneForm(R, [x ** 2, 0]), OneForm(R, [x ** 5 * y ** 3, x ** 6 * y ** 2]), OneForm.exact(x ** 4 * y)):
    print(f"C({w}) = {cartier_operator(w)}")

# the lift x -> x^3 + 3x gives zeta(dx') = x^2 dx + dx
z = cartier_splitting([x, R.zero()])
for i, img in enumerate(z.images):
    print(f"zeta(d{R.twisted().names[i]}) = {img}")
print("section of C:", z.is_section())

# a flat connection with zero p-curvature descends; its flat frame is recovered
S = PolyMatrix(R, [[1, x], [y ** 2, 1 + x * y ** 2]])
c = gauge_transform(ConnectionData.trivial(R, 2), S)
d = cartier_descend(c, 3)
print("flat frame:", d.frame)
print("S * frame:", S * d.frame)

print("theta is a coalgebra map up to level 9:", bool(theta_coalgebra_check(PolyRing(3, ("x",)), 9)))
