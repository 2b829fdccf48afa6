"""Reconstruction error of a planar spiral as the scale shrinks.

Run: python3 demos/spiral.py
"""
from sigre.generators import spiral
from sigre.reconstruct import reconstruct_polygonal

x = spiral()
print(" eps      deltas                  letters  sup error  d(X^eps, X)  bound")
for eps in (0.25, 0.125, 0.0625):
    r = reconstruct_polygonal(x, eps)
    ds = ", ".join(f"{d:.4f}" for d in r.deltas)
    print(f"{eps:6.4f}  [{ds}]  {r.L + 1:7d}  {r.sup_error:9.4f}  {r.d_metric:11.4f}  {r.bound:5.1f}")
