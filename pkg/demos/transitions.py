"""SL(2, Z) x| (K^x)^2 acting on sections and base points."""
import random

from qtate import Scalar, TwistedElement, samples, sheaf
from qtate.sheaf import PULLBACK, PUSHFORWARD, TransitionData

q = Scalar({0: 1, 1: 1})
rng = random.Random(1)
B = samples.skew_twist(rng, 2)
g = TransitionData([[2, 1], [1, 1]], [Scalar.t(2), Scalar({0: -1})])
f = TwistedElement(B, q, {(1, 0): 1, (-1, 2): Scalar.t(), (2, 1): Scalar({-1: 3})})

image = sheaf.transform_section(g, f)
print("f       =", f)
print("g . f   =", image)
for x in [(0, 0), (1, -2), (3, 1)]:
    y = sheaf.transform_point(g, x, PUSHFORWARD)
    print(f"x={x} -> {tuple(map(str, y))}:",
          sheaf.stalk_lognorm(f, x), "==", sheaf.stalk_lognorm(image, y))
    print("   pullback form holds:", sheaf.equivariance_holds(g, f, x, PULLBACK))

h = TransitionData([[1, 1], [0, 1]], [Scalar({0: 2}), Scalar({0: 1, 1: 1})])
twice = sheaf.transform_section(g, sheaf.transform_section(h, f))
print("composition law:", twice == sheaf.transform_section(g.compose(h), f))
