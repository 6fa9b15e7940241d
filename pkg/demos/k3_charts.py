"""Three torus charts of the quantum K3 local model."""
from qtate import Scalar, k3model

q = Scalar({0: 1, 1: 1})
print("orientation oracle:", [c.describe() for c in k3model.select_conventions(q)])

pres = k3model.KThreePresentation(q)
for i in (1, 2, 3):
    ch = k3model.chart(i, q)
    res = k3model.verify_chart_homomorphism(ch, pres)
    print(f"chart {i}: images {[str(x) for x in ch.images]}")
    print(f"         residuals {[str(r) for r in res]}")
    rep = k3model.compatibility_sweep(ch, k3model.grid(ch, 12))
    print(f"         tropical sweep ok={rep.ok} on {rep.points} points {rep.branches}")

print("f(-1, 2) in chart 1 =", tuple(map(str, k3model.map_f((-1, 2), k3model.chart(1, q)))))
for overlap in ("12", "13"):
    print(overlap, k3model.glue_automorphism_check(overlap, q).to_json())
print("U2/U3 identification round trip:", k3model.identification_roundtrip(q))
