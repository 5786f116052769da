"""
Stability functions and their pole structure
============================================

Every built-in Runge-Kutta method comes with a rational stability function.
Here we split each one into simple fractions and look at what the stepper
will need: the poles, their multiplicities, and the step cost ``s``.
"""

import numpy as np

from ratstep import (
    approximation_order, builtin_tableaus, is_a_stable, partial_fractions, stability_function,
)

# Build the stability function of each tableau and decompose it.
for name, tableau in builtin_tableaus().items():
    r = stability_function(tableau)
    pf = partial_fractions(r)
    print(f"{name}: order {approximation_order(r)}, A-stable {is_a_stable(r)}, "
          f"r(inf) = {pf.r_inf.real:+.4f}, s = {pf.total_stages_s}")
    for g in pf.groups:
        print(f"    w = {g.w:.6f}  multiplicity {g.m}  coefficients "
              + ", ".join(f"{c:.4f}" for c in g.coeffs))

# The decomposition is only useful if it reproduces r. Check it on a few
# points in the left half-plane, where the method actually lives.
z = np.array([-0.5, -3 + 2j, -40j, -1e3])
r = stability_function(builtin_tableaus()["gauss3"])
print("max reconstruction gap:", np.max(np.abs(partial_fractions(r)(z) - r(z))))

# SDIRK3 has a single pole of multiplicity three, so one factorization of
# (I - tau w A) serves all three solves of a step.
