"""Arithmetic in a q-commuting torus over Q((t)) and its Gauss norm."""
from fractions import Fraction

from qtate import Scalar, TwistForm, TwistedElement, gauss_norm
from qtate.qalg import monomial_inverse

q = Scalar({0: 1, 1: 1})          # q = 1 + t, so |q| = 1 and |q - 1| = e**-1
B = TwistForm.q_commuting(2)      # x y = q y x
one = TwistedElement.constant(B, q)
x, y = one.mono((1, 0)), one.mono((0, 1))

print("x*y =", x * y)
print("y*x =", y * x)
print("x*y - q*y*x =", x * y - (y * x).scale(q))

f = x + y.scale(Scalar.t()) + (x * x * y).scale(Scalar({0: 3, 1: -1}))
g = monomial_inverse(x) + one.scale(Scalar.t(-1))
for rho in [(0, 0), (Fraction(1, 2), 2), (-1, Fraction(3, 4))]:
    lhs = gauss_norm(f * g, rho)
    rhs = gauss_norm(f, rho) + gauss_norm(g, rho)
    print(f"rho={tuple(map(str, rho))}: |fg| = {lhs}, |f| + |g| = {rhs}")

# truncated series arithmetic tracks absolute precision honestly
s = Scalar({-2: 1, 0: 3, 5: 1})
print("s * s^-1 =", s * s.inv(), "known mod t^%d" % (s * s.inv()).precision)
