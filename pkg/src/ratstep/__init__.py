"""Rational time stepping for linear non-homogeneous evolution problems.

Integrates ``u' = A u + f(t)`` with a method built from an A-stable rational
approximation ``r`` of ``exp`` that keeps the classical order of ``r``, at the
cost of ``s`` shifted solves and one new source evaluation per step.
An implicit Runge-Kutta baseline is included for comparison.
"""

from .convergence import (
    ConvergenceReport, SweepSpec, estimate_orders, reproduce, run_sweep, to_csv, from_csv,
    to_markdown,
)
from .nodes import GammaTable, build_gamma_table, gamma_weights, node_schedule, resolvent_taylor
from .operators import (
    ShiftedSolveOperator, dense_operator, make_heat_1d, make_heat_2d, make_upwind_1d,
)
from .rational import (
    PartialFractionForm, PoleGroup, RationalFunction, approximation_order, evaluate,
    is_a_stable, partial_fractions, tau_threshold,
)
from .steppers import (
    RationalStepperState, prepare_rational, rational_integrate, rational_step, rk_integrate,
)
from .tableaus import ButcherTableau, builtin_tableaus, get_tableau, stability_function, stage_order
from .testbeds import ProblemInstance, make_advection, make_heat1d, make_heat2d, make_problem

__version__ = "0.1.0"
