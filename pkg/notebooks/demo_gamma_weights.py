"""
Sampling the source on the step grid
====================================

The rational method never evaluates the source at stage times. Instead it
samples ``f`` at grid points ``t_n + tau c`` and combines the samples with
precomputed weights. This script prints the node offsets for an order-4
method and checks the weights on a polynomial.
"""

import math

import numpy as np

from ratstep import build_gamma_table, builtin_tableaus, node_schedule, partial_fractions
from ratstep import stability_function

p = 4
for n in range(6):
    print(f"step {n}: offsets {node_schedule(n, p).astype(int).tolist()}, "
          f"times {(n + node_schedule(n, p)).astype(int).tolist()}")

# The first steps share the start-up grid {0, 1, 2, 3}; from step p on the
# window slides by one, so only the newest grid value is fresh.

pf = partial_fractions(stability_function(builtin_tableaus()["sdirk3"]))
table = build_gamma_table(pf)
c, weights = table.for_step(10)
w = pf.groups[0].w

# For v(t) = t^3 the weighted samples equal (I - tau w d/dt)^{-1} v exactly.
tau, t = 0.05, 0.8
approx = np.sum(weights[0][0] * (t + tau * c) ** 3)
exact = sum((tau * w) ** r * math.perm(3, r) * t ** (3 - r) for r in range(4))
print("weights:", np.round(weights[0][0], 6))
print("weighted samples:", approx, " exact:", exact)
