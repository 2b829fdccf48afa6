"""A self-intersecting loop: pick the truncation degree, then reconstruct in E_N.

Run: python3 demos/figure_eight.py
"""
from sigre.degree_select import lift_stabilization, projection_stabilized_degree, prop61_check
from sigre.generators import figure_eight
from sigre.lifted_path import LiftedPath
from sigre.reconstruct import reconstruct_polygonal

x = figure_eight()
sel = projection_stabilized_degree(x)
print("N(g; delta):", {float(k): v for k, v in sel.per_delta.items()}, " N(g) =", sel.N_g)
print("coordinate maxima beyond N(g):", prop61_check(x, sel.N_g)["max_by_degree"])
st = lift_stabilization(x, sel.N_g)
print("lifted routes agree:", st.all_equal, " N1 =", st.N1)

y = LiftedPath(x, sel.N_g)
for eps in (0.25, 0.125):
    res = reconstruct_polygonal(y.curve.chordal(2), eps, y.curve(0.0), reference=y.curve)
    print(f"eps={eps}: D={res.D} letters={res.L + 1} error={res.sup_error:.4f} bound={res.bound:.1f}")

big = figure_eight(1.6, 0.5)
print("larger loop, lifting to degree 2 only:", lift_stabilization(big, 2, N_max=5).all_equal)
