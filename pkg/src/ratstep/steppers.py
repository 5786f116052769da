"""Time steppers for ``u' = A u + f(t)``.

The rational method advances

    u_{n+1} = r(tau A) u_n + tau E_n(tau) f(t_n + tau c_n)

by running, for each pole group ``l``, the resolvent recurrence

    x_0 = u_n,   x_i = (I - tau w_l A)^{-1} (x_{i-1} + tau w_l g_{l,i}),

with ``g_{l,i} = gamma_{l,i} . f(t_n + tau c_n)``, and summing
``r_inf u_n + sum_l sum_i r_{l,i} x_i``. The code carries the increments
``d_i = x_i - u_n`` instead, which satisfy

    d_0 = 0,   d_i = (I - tau w_l A)^{-1} (d_{i-1} + tau w_l (A u_n + g_{l,i})),

and, since ``r_inf + sum r_{l,i} = 1``, give ``u_{n+1} = u_n + sum r_{l,i} d_i``.
Both forms are the same map; the increment form loses less to cancellation
when the step changes ``u_n`` only slightly. That is ``s`` shifted solves per
step. The source is sampled on the step grid only, so each value is computed
once and reused by later steps.

``rk_integrate`` is the classical implicit Runge-Kutta baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ImaginaryResidueTooLarge, StepSizeAboveThreshold
from .nodes import GammaTable, build_gamma_table
from .operators import ShiftedSolveOperator
from .rational import PartialFractionForm, partial_fractions, tau_threshold
from .tableaus import ButcherTableau, stability_function

Source = Callable[[float], np.ndarray]


@dataclass
class RationalStepperState:
    """Mutable iterate of the rational method.

    ``evaluations`` maps a grid index ``k`` to ``f(k tau)``; entries that no
    later step can use are dropped. ``evaluation_count`` and
    ``new_evaluations`` (one entry per completed step) record the cost.
    """

    u: np.ndarray
    tau: float
    pf: PartialFractionForm
    gamma: GammaTable
    n: int = 0
    pair_conjugates: bool = False
    evaluations: dict = field(default_factory=dict)
    evaluation_count: int = 0
    new_evaluations: list = field(default_factory=list)

    @property
    def t(self) -> float:
        return self.n * self.tau


def _pair_plan(pf: PartialFractionForm):
    """Per group: 1 (use as is), 2 (add twice the real part) or 0 (skip, conjugate of another)."""
    plan = [1] * len(pf.groups)
    for i, g in enumerate(pf.groups):
        if plan[i] != 1 or g.w.imag == 0:
            continue
        for j in range(i + 1, len(pf.groups)):
            h = pf.groups[j]
            if (plan[j] == 1 and h.m == g.m and abs(h.w - g.w.conjugate()) <= 1e-13 * abs(g.w)
                    and np.allclose(h.coeffs, np.conj(g.coeffs), rtol=1e-12, atol=1e-14)):
                plan[i], plan[j] = 2, 0
                break
    return plan


def rational_step(state: RationalStepperState, op: ShiftedSolveOperator, f: Source,
                  real: bool = True) -> RationalStepperState:
    """Advance ``state`` by one step in place and return it."""
    pf, tau, n = state.pf, state.tau, state.n
    if not tau < tau_threshold(pf, op.omega):
        raise StepSizeAboveThreshold(f"tau = {tau} not below threshold for omega = {op.omega}")
    nodes, weights = state.gamma.for_step(n)
    idx = n + nodes.astype(int)

    fresh = 0
    for k in idx:
        if k not in state.evaluations:
            state.evaluations[k] = np.asarray(f(k * tau))
            fresh += 1
    state.evaluation_count += fresh
    state.new_evaluations.append(fresh)
    F = np.stack([state.evaluations[k] for k in idx])

    u = state.u
    plan = _pair_plan(pf) if state.pair_conjugates else [1] * len(pf.groups)
    # increments d_i = x_i - u_n obey d_i = R (d_{i-1} + tau w (A u_n + g_i)), d_0 = 0,
    # and r_inf + sum r_li = 1 gives u_{n+1} = u_n + sum r_li d_i
    Au = op.apply(u)
    inc = 0.0
    for g, block, mode in zip(pf.groups, weights, plan):
        if mode == 0:
            continue
        d = 0.0
        contrib = 0.0
        for i in range(g.m):
            d = op.solve_shifted(g.w, tau, d + tau * g.w * (Au + block[i] @ F))
            contrib = contrib + g.coeffs[i] * d
        inc = inc + (2.0 * contrib.real if mode == 2 else contrib)
    out = u + inc

    if real:
        norm = np.linalg.norm(out)
        if np.linalg.norm(out.imag) > 1e-10 * max(norm, 1e-300):
            raise ImaginaryResidueTooLarge(
                f"step {n}: imaginary part {np.linalg.norm(out.imag):.3e} vs norm {norm:.3e}"
            )
        out = out.real.astype(complex)
    state.u = out

    # only indices >= n + 1 - (p - 1) can be needed again
    oldest = n + 1 - (state.gamma.p - 1)
    for k in [k for k in state.evaluations if k < oldest]:
        del state.evaluations[k]
    state.n = n + 1
    return state


@dataclass
class IntegrationResult:
    u: np.ndarray
    n_steps: int
    tau: float
    solves: int
    evaluations: int
    history: list | None = None
    new_evaluations: list | None = None


def prepare_rational(method) -> tuple[PartialFractionForm, GammaTable]:
    """Partial fractions and weight table for a tableau or a rational function."""
    r = stability_function(method) if isinstance(method, ButcherTableau) else method
    pf = partial_fractions(r)
    return pf, build_gamma_table(pf)


def rational_integrate(problem, pf: PartialFractionForm, gamma: GammaTable, n_steps: int,
                       T: float | None = None, pair_conjugates: bool = False,
                       keep_history: bool = False) -> IntegrationResult:
    """Integrate ``problem`` (needs ``operator``, ``u0``, ``source``) over ``[0, T]`` in ``n_steps``."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    T = getattr(problem, "T", 1.0) if T is None else T
    op = problem.operator
    u0 = np.asarray(problem.u0)
    real = not np.iscomplexobj(u0)
    state = RationalStepperState(
        u=u0.astype(complex), tau=T / n_steps, pf=pf, gamma=gamma,
        pair_conjugates=pair_conjugates and real,
    )
    start = op.solve_count
    history = [u0.copy()] if keep_history else None
    for _ in range(n_steps):
        rational_step(state, op, problem.source, real=real)
        if keep_history:
            history.append(state.u.real.copy() if real else state.u.copy())
    u = state.u.real if real else state.u
    return IntegrationResult(u=u, n_steps=n_steps, tau=state.tau, solves=op.solve_count - start,
                             evaluations=state.evaluation_count, history=history,
                             new_evaluations=state.new_evaluations)


def _dirk_step(op, tab, u, t, tau, f):
    s = tab.stages
    K = []
    for i in range(s):
        v = u + tau * sum((tab.W[i, j] * K[j] for j in range(i)), np.zeros_like(u))
        rhs = op.apply(v) + f(t + tab.c[i] * tau)
        K.append(op.solve_shifted(tab.W[i, i], tau, rhs))
    return u + tau * sum(b * k for b, k in zip(tab.b, K))


def rk_integrate(problem, tableau: ButcherTableau, n_steps: int, T: float | None = None,
                 keep_history: bool = False) -> IntegrationResult:
    """Implicit RK on the linear system; DIRK stages sequentially, others via eigen-decoupling.

    For a full ``W = V diag(lam) V^{-1}`` the coupled stage system
    ``(I - tau W (x) A) K = A u + f(t + c tau)`` splits into ``s`` complex
    shifted solves with shifts ``lam_i``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    T = getattr(problem, "T", 1.0) if T is None else T
    op = problem.operator
    f = problem.source
    tau = T / n_steps
    u = np.asarray(problem.u0)
    real = not np.iscomplexobj(u)
    u = u.astype(complex)
    start = op.solve_count
    history = [u.real.copy() if real else u.copy()] if keep_history else None
    n_eval = 0

    dirk = tableau.is_diagonally_implicit()
    if not dirk:
        lam, V = np.linalg.eig(tableau.W)
        Vinv = np.linalg.inv(V)
        # eigenvector-weighted b so that u += tau * (b^T V) Y
        bV = tableau.b @ V

    for n in range(n_steps):
        t = n * tau
        if dirk:
            u = _dirk_step(op, tableau, u, t, tau, f)
        else:
            Au = op.apply(u)
            rhs = [Au + f(t + ci * tau) for ci in tableau.c]
            acc = np.zeros_like(u)
            for i in range(tableau.stages):
                z = sum(Vinv[i, j] * rhs[j] for j in range(tableau.stages))
                acc = acc + bV[i] * op.solve_shifted(lam[i], tau, z)
            u = u + tau * acc
        n_eval += tableau.stages
        if real:
            u = u.real.astype(complex)
        if keep_history:
            history.append(u.real.copy() if real else u.copy())
    return IntegrationResult(u=u.real if real else u, n_steps=n_steps, tau=tau,
                             solves=op.solve_count - start, evaluations=n_eval, history=history)
