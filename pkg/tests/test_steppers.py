import math

import numpy as np
import pytest

from ratstep import (
    PartialFractionForm, PoleGroup, RationalStepperState, build_gamma_table, builtin_tableaus,
    dense_operator, make_problem, prepare_rational, rational_integrate, rational_step, rk_integrate,
    stability_function,
)
from ratstep.errors import ImaginaryResidueTooLarge, StepSizeAboveThreshold
from ratstep.checks import extended_generator

from conftest import make_dense_problem, random_dissipative

METHODS = list(builtin_tableaus())
PREPARED = {name: prepare_rational(t) for name, t in builtin_tableaus().items()}


def matrix_rational(r, X):
    """r(X) = Q(X)^{-1} P(X) by Horner on matrices; independent of partial fractions."""
    def poly(coeffs):
        out = np.zeros_like(X, dtype=complex)
        for a in coeffs[::-1]:
            out = out @ X + a * np.eye(X.shape[0])
        return out
    return np.linalg.solve(poly(r.denominator), poly(r.numerator))


@pytest.mark.parametrize("name", METHODS)
def test_zero_operator_constant_source(name):
    pf, gamma = PREPARED[name]
    prob = make_dense_problem([[0.0]], [0.0], source=lambda t: np.array([1.0]))
    res = rational_integrate(prob, pf, gamma, 7, keep_history=True)
    for n, u in enumerate(res.history):
        assert u[0] == pytest.approx(n / 7, abs=1e-14)


def test_scalar_implicit_euler_step():
    pf, gamma = PREPARED["implicit_euler"]
    prob = make_dense_problem([[-1.0]], [1.0])
    assert rational_integrate(prob, pf, gamma, 1, T=0.5).u[0] == pytest.approx(2 / 3, rel=1e-15)


@pytest.mark.parametrize("name", METHODS)
def test_homogeneous_matches_matrix_function(name, rng):
    tab = builtin_tableaus()[name]
    pf, gamma = PREPARED[name]
    A = random_dissipative(8, rng)
    u0 = rng.standard_normal(8)
    N, T = 6, 0.9
    R = matrix_rational(stability_function(tab), (T / N) * A)
    expected = np.linalg.matrix_power(R, N) @ u0
    got = rational_integrate(make_dense_problem(A, u0), pf, gamma, N, T=T).u
    assert np.linalg.norm(got - expected) <= 1e-12 * np.linalg.norm(expected)


@pytest.mark.parametrize("name", METHODS)
def test_homogeneous_rk_equivalence(name, rng):
    tab = builtin_tableaus()[name]
    pf, gamma = PREPARED[name]
    A = random_dissipative(10, rng)
    u0 = rng.standard_normal(10)
    a = rational_integrate(make_dense_problem(A, u0), pf, gamma, 20).u
    b = rk_integrate(make_dense_problem(A, u0), tab, 20).u
    assert np.linalg.norm(a - b) <= 1e-12 * np.linalg.norm(b)


@pytest.mark.parametrize("name", METHODS)
def test_rk_scalar_step_is_stability_function(name):
    tab = builtin_tableaus()[name]
    lam, tau = -3.0, 0.2
    u1 = rk_integrate(make_dense_problem([[lam]], [1.0]), tab, 1, T=tau).u[0]
    assert u1 == pytest.approx(stability_function(tab)(tau * lam).real, rel=1e-13)


@pytest.mark.parametrize("name", METHODS)
def test_step_matches_extended_surrogate(name, rng):
    """One step equals the first block of r(tau G) on the polynomial-source surrogate."""
    tab = builtin_tableaus()[name]
    pf, gamma = PREPARED[name]
    p = pf.order_p
    n = 3
    A = random_dissipative(n, rng)
    a = rng.standard_normal((p, n))  # f(t) = sum_k a_k t^k

    def f(t):
        return sum(a[k] * t**k for k in range(p))

    tau = 0.1
    G = extended_generator(A, p)
    R = matrix_rational(stability_function(tab), tau * G)
    state = RationalStepperState(u=rng.standard_normal(n).astype(complex), tau=tau, pf=pf, gamma=gamma)
    op = dense_operator(A)
    for step in range(p + 2):
        t = step * tau
        # Taylor coefficients of s -> f(t + s)
        shifted = [sum(math.comb(k, j) * t ** (k - j) * a[k] for k in range(j, p)) for j in range(p)]
        U = np.concatenate([state.u] + shifted)
        expected = (R @ U)[:n]
        rational_step(state, op, f)
        assert np.linalg.norm(state.u - expected) <= 1e-11 * np.linalg.norm(expected), step


@pytest.mark.parametrize("name", METHODS)
def test_polynomial_exactness(name):
    pf, gamma = PREPARED[name]
    p = pf.order_p
    coef = np.array([[1.0, -2.0, 0.5, 3.0, -1.0, 2.0][:p], [0.3] * p])

    def f(t):
        return coef @ (t ** np.arange(p))

    def exact(t):
        return np.array([1.0, -1.0]) + coef @ (t ** np.arange(1, p + 1) / np.arange(1, p + 1))

    prob = make_dense_problem(np.zeros((2, 2)), exact(0.0), source=f)
    u = rational_integrate(prob, pf, gamma, 100).u
    assert np.linalg.norm(u - exact(1.0)) <= 1e-9 * np.linalg.norm(exact(1.0))


@pytest.mark.parametrize("name", METHODS)
def test_cost_accounting(name):
    pf, gamma = PREPARED[name]
    p, s = pf.order_p, pf.total_stages_s
    prob = make_problem("heat1d", 30)
    res = rational_integrate(prob, pf, gamma, 50)
    assert res.solves == 50 * s
    # the first step fills the start-up grid {0..p-1}; from step p on, one new sample each
    assert res.new_evaluations == [p] + [0] * (p - 1) + [1] * (50 - p)
    assert res.evaluations == 50


def test_evaluation_cache_stays_small():
    pf, gamma = PREPARED["gauss3"]
    prob = make_problem("heat1d", 20)
    state = RationalStepperState(u=prob.u0.astype(complex), tau=0.02, pf=pf, gamma=gamma)
    calls = []

    def f(t):
        calls.append(t)
        return prob.source(t)

    for _ in range(30):
        rational_step(state, prob.operator, f)
        assert len(state.evaluations) <= pf.order_p
    assert len(calls) == len(set(calls)) == 30


def test_conjugate_pairing_equivalence():
    pf, gamma = PREPARED["gauss3"]
    assert any(g.w.imag != 0 for g in pf.groups)
    prob = make_problem("heat1d", 40)
    full = rational_integrate(prob, pf, gamma, 25)
    paired = rational_integrate(make_problem("heat1d", 40), pf, gamma, 25, pair_conjugates=True)
    assert np.linalg.norm(full.u - paired.u) <= 1e-12 * np.linalg.norm(full.u)
    assert paired.solves == 25 * (pf.total_stages_s - 1)


def test_rk_solve_counts():
    prob = make_problem("heat1d", 20)
    for name, tab in builtin_tableaus().items():
        assert rk_integrate(prob, tab, 10).solves == 10 * tab.stages


def test_step_size_threshold():
    pf, gamma = PREPARED["implicit_euler"]
    prob = make_dense_problem([[2.0]], [1.0])
    object.__setattr__(prob, "operator", dense_operator([[2.0]], omega=2.0))
    with pytest.raises(StepSizeAboveThreshold):
        rational_integrate(prob, pf, gamma, 1)
    assert rational_integrate(prob, pf, gamma, 4).u[0] == pytest.approx(1 / (1 - 0.5) ** 4)


def test_unpaired_complex_pole_is_caught():
    w = 1 + 0.5j
    c = 1 / w  # keeps r(0) = 1 and r'(0) = 1 but r is not real
    pf = PartialFractionForm(1 - c, (PoleGroup(w, 1, (c,)),), 1)
    prob = make_dense_problem([[-1.0]], [1.0])
    with pytest.raises(ImaginaryResidueTooLarge):
        rational_integrate(prob, pf, build_gamma_table(pf), 2)


def test_complex_initial_data_is_allowed():
    pf, gamma = PREPARED["sdirk3"]
    A = np.array([[-1.0, 0.0], [0.0, -2.0]])
    prob = make_dense_problem(A, [0.0, 0.0])
    object.__setattr__(prob, "u0", np.array([1.0 + 1j, 1j]))
    u = rational_integrate(prob, pf, gamma, 40).u
    assert np.allclose(u, np.array([1 + 1j, 1j]) * np.exp([-1.0, -2.0]), rtol=1e-5)


def test_implicit_euler_converges_first_order():
    pf, gamma = PREPARED["implicit_euler"]
    prob = make_problem("heat1d", 20)
    e = [prob.error(rational_integrate(prob, pf, gamma, N).u) for N in (100, 200)]
    assert math.log2(e[0] / e[1]) == pytest.approx(1.0, abs=0.05)
