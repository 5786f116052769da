import math

import numpy as np
import pytest

from ratstep import make_advection, make_heat1d, make_heat2d, make_problem
from ratstep.errors import UnknownId

FACTORIES = [make_advection, make_heat1d, make_heat2d]


def fd_derivative(fun, t, h=1e-3):
    """Sixth-order central difference, independent of the closed-form derivatives."""
    c = [-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60]
    return sum(ck * fun(t + (k - 3) * h) for k, ck in enumerate(c)) / h


@pytest.mark.parametrize("make", FACTORIES)
@pytest.mark.parametrize("t", [0.0, 0.3, 0.7, 1.0])
def test_residual_invariant(make, t):
    prob = make(20)
    assert prob.residual(t) <= 1e-8 * (1 + prob.norm(prob.exact(t)))


@pytest.mark.parametrize("make", FACTORIES)
@pytest.mark.parametrize("t", [0.25, 1.0])
def test_source_against_finite_difference_derivative(make, t):
    prob = make(16)
    du = fd_derivative(prob.exact, t)
    f = du - prob.operator.apply(prob.exact(t))
    assert prob.norm(f - prob.source(t)) <= 1e-8 * (1 + prob.norm(prob.source(t)))


@pytest.mark.parametrize("make", FACTORIES)
def test_initial_value(make):
    prob = make(10)
    assert np.array_equal(prob.u0, prob.exact(0.0))
    assert prob.T == 1.0


def test_advection_values():
    prob = make_advection(10)
    assert prob.exact(0.0)[-1] == pytest.approx(1.0)
    assert prob.norm_kind == "max"
    # interior source approaches (x + 1) e^t; upwinding is exact on linear data
    x = prob.grid[0]
    assert np.allclose(prob.source(0.5)[1:], (x[1:] + 1) * math.exp(0.5))


def test_heat1d_values():
    prob = make_heat1d(10)
    assert np.allclose(prob.exact(0.0), 0.0)
    assert prob.exact(1.0)[4] == pytest.approx(0.5 * math.sin(0.5) * math.exp(0.5))
    assert prob.operator.dimension == 9
    assert prob.h == pytest.approx(0.1)


def test_heat2d_values():
    prob = make_heat2d(10)
    n = 9
    u = prob.exact(0.0).reshape(n, n)
    # x^3 y (x-1) (y-1)^3 at (1/2, 1/2): eight factors of magnitude 1/2, two negative
    assert u[4, 4] == pytest.approx(0.5**8)
    x = prob.grid[0]
    assert u[2, 6] == pytest.approx(x[2] ** 3 * x[6] * (x[2] - 1) * (x[6] - 1) ** 3)


def test_norms():
    prob = make_heat1d(16)
    v = np.ones(15)
    assert prob.norm(v) == pytest.approx(math.sqrt(15 / 16))
    assert prob.with_norm("max").norm(2 * v) == 2.0
    assert make_heat2d(4).norm(np.ones(9)) == pytest.approx(3 / 4)
    with pytest.raises(UnknownId):
        prob.with_norm("h1")


def test_factory_checks():
    with pytest.raises(UnknownId):
        make_problem("wave", 10)
    with pytest.raises(ValueError):
        make_heat1d(2)
    with pytest.raises(ValueError):
        make_advection(1)
