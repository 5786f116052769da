"""Self-checks behind ``ratstep check``.

Each check returns ``(name, passed, detail)``. They are quick property
checks on small problems, independent of the convergence tables.
"""

from __future__ import annotations

import math

import numpy as np

from .nodes import build_gamma_table, resolvent_taylor
from .operators import dense_operator, make_heat_1d, make_heat_2d, make_upwind_1d
from .rational import approximation_order, is_a_stable, partial_fractions
from .steppers import prepare_rational, rational_integrate, rk_integrate
from .tableaus import builtin_tableaus, stability_function, stage_order
from .testbeds import PROBLEMS, ProblemInstance, make_problem


def random_dissipative(n: int, rng) -> np.ndarray:
    """Dense matrix with ``Re <Av, v> <= 0``: negative semidefinite plus skew part."""
    S = rng.standard_normal((n, n))
    K = rng.standard_normal((n, n))
    return -(S @ S.T) / n + (K - K.T) / 2


def extended_generator(A: np.ndarray, p: int) -> np.ndarray:
    """Finite stand-in for ``[[A, L], [0, d/dt]]`` on vector polynomials of degree < p.

    The source block holds Taylor coefficients ``a_0..a_{p-1}`` (each a vector
    of length ``n``) of ``v(t) = sum a_k t^k``; ``L`` reads ``a_0``.
    """
    n = A.shape[0]
    D = np.diag(np.arange(1, p, dtype=float), 1)
    G = np.zeros((n + n * p, n + n * p))
    G[:n, :n] = A
    G[:n, n:2 * n] = np.eye(n)
    G[n:, n:] = np.kron(D, np.eye(n))
    return G


def resolvent_recurrence(A: np.ndarray, p: int, lam: complex, k: int, u0, v0):
    """``(lam I - G)^{-k} (u0, v0)`` by separate resolvents of ``A`` and the shift block."""
    n = A.shape[0]
    B = np.kron(np.diag(np.arange(1, p, dtype=float), 1), np.eye(n))
    RA = np.linalg.inv(lam * np.eye(n) - A)
    RB = np.linalg.inv(lam * np.eye(n * p) - B)
    u, v = np.asarray(u0, complex), np.asarray(v0, complex)
    for _ in range(k):
        v = RB @ v
        u = RA @ (u + v[:n])
    return u, v


def _check_partial_fractions():
    worst = 0.0
    rng = np.random.default_rng(0)
    for name, tab in builtin_tableaus().items():
        r = stability_function(tab)
        pf = partial_fractions(r)
        z = 10 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
        poles = 1 / np.array([g.w for g in pf.groups])
        z = z[np.min(np.abs(z[:, None] - poles[None, :]), axis=1) > 1e-3]
        exact = r(z)
        worst = max(worst, np.max(np.abs(pf(z) - exact) / (1 + np.abs(exact))))
        s0 = pf.r_inf + sum(sum(g.coeffs) for g in pf.groups)
        s1 = sum(j * c * g.w for g in pf.groups for j, c in enumerate(g.coeffs, 1))
        if abs(s0 - 1) > 1e-12 or abs(s1 - 1) > 1e-12:
            return "partial fractions", False, f"{name}: consistency sums {s0}, {s1}"
    return "partial fractions", worst <= 1e-10, f"max reconstruction error {worst:.2e}"


def _check_tableaus():
    bad = []
    for name, tab in builtin_tableaus().items():
        r = stability_function(tab)
        if approximation_order(r) != tab.declared_order_p:
            bad.append(f"{name} order")
        if stage_order(tab) != tab.declared_stage_order_q:
            bad.append(f"{name} stage order")
        if not is_a_stable(r):
            bad.append(f"{name} not A-stable")
    return "tableaus", not bad, ", ".join(bad) or "orders, stage orders, A-stability ok"


def _check_operators():
    rng = np.random.default_rng(1)
    worst = 0.0
    for op in (make_upwind_1d(20), make_heat_1d(21), make_heat_2d(8),
               dense_operator(random_dissipative(12, rng))):
        rhs = rng.standard_normal(op.dimension) + 1j * rng.standard_normal(op.dimension)
        x = op.solve_shifted(1 + 1j, 0.1, rhs)
        res = np.linalg.norm(x - 0.1 * (1 + 1j) * op.apply(x) - rhs) / np.linalg.norm(rhs)
        worst = max(worst, res)
        v = rng.standard_normal(op.dimension)
        if v @ op.apply(v) > 1e-12 * np.linalg.norm(op.to_dense()) * (v @ v):
            return "operators", False, f"{op!r} not dissipative"
    return "operators", worst <= 1e-10, f"max relative residual {worst:.2e}"


def _check_gamma():
    worst = 0.0
    for tab in builtin_tableaus().values():
        pf = partial_fractions(stability_function(tab))
        table = build_gamma_table(pf)
        p = table.p
        fact = np.array([math.factorial(k) for k in range(p)])
        for c, per_group in zip(table.nodes, table.weights):
            for g, block in zip(pf.groups, per_group):
                for i, gamma in enumerate(block, start=1):
                    F = resolvent_taylor(g.w, i, p)
                    mom = np.array([np.sum(gamma * c**k) for k in range(p)])
                    worst = max(worst, np.max(np.abs(mom - fact * F) / np.maximum(1, np.abs(fact * F))))
    return "gamma moments", worst <= 1e-9, f"max relative moment error {worst:.2e}"


def _check_homogeneous():
    rng = np.random.default_rng(2)
    A = random_dissipative(10, rng)
    u0 = rng.standard_normal(10)
    worst = 0.0
    for tab in builtin_tableaus().values():
        prob = ProblemInstance("dense", dense_operator(A), (np.arange(10.0),), u0,
                               lambda t: np.zeros(10), lambda t: np.zeros(10))
        pf, gamma = prepare_rational(tab)
        a = rational_integrate(prob, pf, gamma, 20).u
        b = rk_integrate(prob, tab, 20).u
        worst = max(worst, np.linalg.norm(a - b) / np.linalg.norm(b))
    return "homogeneous equivalence", worst <= 1e-12, f"max relative gap {worst:.2e}"


def _check_costs():
    bad = []
    for name, tab in builtin_tableaus().items():
        prob = make_problem("heat1d", 20)
        pf, gamma = prepare_rational(tab)
        res = rational_integrate(prob, pf, gamma, 50)
        if res.solves != 50 * pf.total_stages_s:
            bad.append(f"{name}: {res.solves} solves")
        p = pf.order_p
        expected = [p] + [1 if n >= p else 0 for n in range(1, 50)]
        if res.new_evaluations != expected:
            bad.append(f"{name}: evaluations {res.new_evaluations[:p + 2]}...")
    return "cost accounting", not bad, ", ".join(bad) or "s solves per step, one new evaluation per step once n >= p"


def _check_polynomial_exactness():
    worst = 0.0
    for tab in builtin_tableaus().values():
        pf, gamma = prepare_rational(tab)
        p = pf.order_p
        coef = np.linspace(1.0, 2.0, 3)[:, None] * np.arange(1, p + 1)[None, :]

        def f(t):
            return coef @ (t ** np.arange(p))

        def exact(t):
            return 1.0 + coef @ (t ** np.arange(1, p + 1) / np.arange(1, p + 1))

        prob = ProblemInstance("zero", dense_operator(np.zeros((3, 3))), (np.arange(3.0),),
                               exact(0.0), f, exact)
        u = rational_integrate(prob, pf, gamma, 100).u
        worst = max(worst, np.linalg.norm(u - exact(1.0)) / np.linalg.norm(exact(1.0)))
    return "polynomial exactness", worst <= 1e-9, f"max relative error {worst:.2e}"


def _check_block_oracle():
    rng = np.random.default_rng(3)
    n, p = 3, 4
    A = random_dissipative(n, rng)
    G = extended_generator(A, p)
    lam = 2.0 + 0.5j
    z0 = rng.standard_normal(n + n * p)
    worst = 0.0
    for k in (1, 2, 3):
        direct = np.linalg.matrix_power(np.linalg.inv(lam * np.eye(G.shape[0]) - G), k) @ z0
        u, v = resolvent_recurrence(A, p, lam, k, z0[:n], z0[n:])
        worst = max(worst, np.linalg.norm(np.concatenate([u, v]) - direct) / np.linalg.norm(direct))
    return "resolvent recurrence", worst <= 1e-10, f"max relative gap {worst:.2e}"


def _check_testbeds():
    worst = 0.0
    for name in PROBLEMS:
        prob = make_problem(name, 20)
        for t in (0.0, 0.3, 0.7, 1.0):
            worst = max(worst, prob.residual(t) / (1 + prob.norm(prob.exact(t))))
    return "testbed residuals", worst <= 1e-8, f"max residual {worst:.2e}"


CHECKS = [
    _check_partial_fractions,
    _check_tableaus,
    _check_operators,
    _check_gamma,
    _check_block_oracle,
    _check_homogeneous,
    _check_costs,
    _check_polynomial_exactness,
    _check_testbeds,
]


def run_checks():
    results = []
    for check in CHECKS:
        try:
            results.append(check())
        except Exception as exc:  # report, do not abort the remaining checks
            results.append((check.__name__.removeprefix("_check_"), False, f"{type(exc).__name__}: {exc}"))
    return results
