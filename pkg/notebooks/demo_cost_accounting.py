"""
What a step costs
=================

Instrumented counters record the shifted solves and the source evaluations
of a run. The rational method needs ``s`` solves per step; after a short
start-up it needs one new source value per step. The RK baseline calls the
source once per stage.
"""

from ratstep import builtin_tableaus, make_problem, prepare_rational, rational_integrate, rk_integrate

N = 50
for name, tab in builtin_tableaus().items():
    pf, gamma = prepare_rational(tab)
    rat = rational_integrate(make_problem("heat1d", 40), pf, gamma, N)
    rk = rk_integrate(make_problem("heat1d", 40), tab, N)
    print(f"{name:15s} rational: {rat.solves} solves, {rat.evaluations} source calls "
          f"(first steps {rat.new_evaluations[:8]})")
    print(f"{'':15s} RK:       {rk.solves} solves, {rk.evaluations} source calls")
