"""Method-of-lines test problems with manufactured solutions.

The semidiscrete source is ``f_h(t) = u_h'(t) - A_h u_h(t)`` with ``u_h`` the
grid restriction of the exact solution, so the grid function solves the ODE
system exactly and every measured error is time-integration error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import UnknownId
from .operators import ShiftedSolveOperator, make_heat_1d, make_heat_2d, make_upwind_1d


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    name: str
    operator: ShiftedSolveOperator
    grid: tuple[np.ndarray, ...]
    u0: np.ndarray
    source: Callable[[float], np.ndarray]
    exact: Callable[[float], np.ndarray]
    exact_dt: Callable[[float], np.ndarray] | None = None
    norm_weight: float = 1.0
    norm_kind: str = "l2"
    T: float = 1.0

    @property
    def M(self) -> int:
        return int(round(1.0 / self.h))

    @property
    def h(self) -> float:
        # every grid starts at x_1 = h
        return float(self.grid[0][0])

    def norm(self, v) -> float:
        """Discrete L2 norm (``sqrt(h) |v|`` in 1D, ``h |v|`` in 2D) or the maximum norm."""
        if self.norm_kind == "max":
            return float(np.max(np.abs(v)))
        return self.norm_weight * float(np.linalg.norm(v))

    def with_norm(self, kind: str) -> "ProblemInstance":
        if kind not in NORMS:
            raise UnknownId(f"unknown norm {kind!r}; choose from {NORMS}")
        return replace(self, norm_kind=kind)

    def residual(self, t: float) -> float:
        """``|u_h'(t) - A_h u_h(t) - f_h(t)|`` in the problem norm."""
        u = self.exact(t)
        return self.norm(self.exact_dt(t) - self.operator.apply(u) - self.source(t))

    def error(self, u, t: float | None = None) -> float:
        return self.norm(np.asarray(u) - self.exact(self.T if t is None else t))


NORMS = ("l2", "max")


def _manufacture(name, op, grid, exact, exact_dt, weight, norm_kind="l2"):
    def source(t):
        return exact_dt(t) - op.apply(exact(t))

    return ProblemInstance(name=name, operator=op, grid=grid, u0=exact(0.0), source=source,
                           exact=exact, exact_dt=exact_dt, norm_weight=weight, norm_kind=norm_kind)


def make_advection(M: int) -> ProblemInstance:
    """``u_t = -u_x + f`` on (0, 1], inflow ``u(t, 0) = 0``, exact ``u = x e^t``.

    Errors are measured in the maximum norm by default for this problem.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    x = np.arange(1, M + 1) / M
    op = make_upwind_1d(M)

    def exact(t):
        return x * np.exp(t)

    return _manufacture("advection", op, (x,), exact, exact, np.sqrt(1.0 / M), "max")


def make_heat1d(M: int) -> ProblemInstance:
    """``u_t = u_xx + f``, zero Dirichlet data, exact ``u = (1 - x) sin(t x) exp(t^2 x)``."""
    if M < 3:
        raise ValueError("M must be at least 3")
    x = np.arange(1, M) / M
    op = make_heat_1d(M)

    def exact(t):
        return (1 - x) * np.sin(t * x) * np.exp(t * t * x)

    def exact_dt(t):
        return (1 - x) * np.exp(t * t * x) * (x * np.cos(t * x) + 2 * t * x * np.sin(t * x))

    return _manufacture("heat1d", op, (x,), exact, exact_dt, np.sqrt(1.0 / M))


def make_heat2d(M: int) -> ProblemInstance:
    """``u_t = Laplace(u) + f`` on the unit square, exact ``u = x^3 y (x-1) (y-1)^3 e^t``.

    Unknowns are row-major over ``(x_i, y_j)``, ``i, j = 1..M-1``.
    """
    if M < 3:
        raise ValueError("M must be at least 3")
    x = np.arange(1, M) / M
    X, Y = np.meshgrid(x, x, indexing="ij")
    shape = (X**3 * Y * (X - 1) * (Y - 1) ** 3).ravel()
    op = make_heat_2d(M)

    def exact(t):
        return shape * np.exp(t)

    return _manufacture("heat2d", op, (x, x), exact, exact, 1.0 / M)


PROBLEMS = {"advection": make_advection, "heat1d": make_heat1d, "heat2d": make_heat2d}


def make_problem(name: str, M: int) -> ProblemInstance:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise UnknownId(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(M)
