"""Factor the product of two crossing walls into slope-ordered walls."""
import time

from qtate import Scalar, TwistForm
from qtate.scatter import (Line, RayFunction, ScatteringDiagram, compose, factorize,
                           format_slope, scatter_chart, wall_aut)

B = TwistForm.ordered([[0, 1], [-1, 0]])     # xi eta = q eta xi

for q in (Scalar.const(1), Scalar({0: 1, 1: 1})):
    g0 = wall_aut((1, 0), {1: 1}, B, q, order=6)    # eta -> eta (1 + 1/xi)**-1
    ginf = wall_aut((0, 1), {1: 1}, B, q, order=6)  # xi -> xi (1 + 1/eta)
    start = time.perf_counter()
    F = factorize(g0, ginf)
    print(f"q = {q}: {time.perf_counter() - start:.2f}s")
    for lam in F.slopes():
        ray = F.factors[lam]
        print(f"  slope {format_slope(lam):>3}: z = m{ray.e0}, f = 1 +",
              " + ".join(f"({c}) z^{j}" for j, c in ray.coeffs))
    print("  product equals g_inf g_0:", F.product() == compose(ginf, g0))

# the same wall crossing, laid out in the plane
one = Scalar.const(1)
lines = [Line((0, -2), (0, 1), RayFunction((0, -1), 1, {1: one})),
         Line((-2, 0), (1, 0), RayFunction((-1, 0), 1, {1: one})),
         Line((-3, -2), (1, 1), RayFunction((-1, -1), 1, {1: one}))]
d = scatter_chart(ScatteringDiagram(B, one, lines), order=4)
print(f"diagram: {len(d.lines)} lines, {len(d.vertices)} vertices, consistent={d.consistent()}")
for l in d.lines[3:]:
    print("  new line from", tuple(map(str, l.base)), "direction", l.alpha, "weight", l.weight)
