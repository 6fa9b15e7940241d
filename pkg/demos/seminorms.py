"""Points of the spectrum: monomial points and shifted polydisc/torus points."""
import random
from fractions import Fraction

from qtate import Scalar, TwistForm, samples, spectra
from qtate.qalg import POLYDISC

q = Scalar({0: 1, 1: 1})
B = TwistForm.q_commuting(2)
rng = random.Random(0)

f = samples.element(rng, B, q, degree=3, domain=POLYDISC)
g = samples.element(rng, B, q, degree=3, domain=POLYDISC)
print("f =", f)
print("g =", g)

p = spectra.ShiftedPolydiscPoint([Scalar.t(), Scalar({0: 1})], [Fraction(-1, 2), 0])
vf, vg, vfg = (spectra.evaluate(p, h) for h in (f, g, f * g))
print(f"polydisc point: nu(f)={vf} nu(g)={vg} nu(fg)={vfg}")

# Laurent elements need strict |a_i| < rho_i; the tail is certified
h = samples.element(rng, B, q, degree=2)
for M in (4, 8):
    pt = spectra.ShiftedTorusPoint([Scalar.t(2), Scalar.t()], [-1, 0], tail_order=M)
    print(f"torus point, M={M}:", spectra.shifted_eval_torus(h, pt).to_json())

print("skeleton retraction of the polydisc point:",
      tuple(str(v) for v in spectra.skeleton_retract(p)))
