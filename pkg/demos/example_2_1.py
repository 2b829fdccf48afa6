"""Two paths with equal signatures and equal 1.5-variation: an arc and the arc with a spike.

Run: python3 demos/example_2_1.py
"""
import math

import numpy as np

from sigre.generators import example_2_1
from sigre.path_model import p_variation
from sigre.signature_core import path_signature

x, y = example_2_1(theta0=0.2, spike=1e-3)
target = 2 * math.sin(0.1)
for name, path in (("arc with spike", x), ("arc", y)):
    r = p_variation(path, 1.5, 2000)
    print(f"{name:15s} 1.5-variation {r.value:.9f}  (|AB| = {target:.9f})")
gap = np.abs(path_signature(x, 4).tensor.flat() - path_signature(y, 4).tensor.flat()).max()
print(f"max signature difference up to degree 4: {gap:.2e}")
