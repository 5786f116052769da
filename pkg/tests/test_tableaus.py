import math

import numpy as np
import pytest

from ratstep import ButcherTableau, approximation_order, builtin_tableaus, get_tableau, is_a_stable
from ratstep import stability_function, stage_order
from ratstep.errors import UnknownId
from ratstep.tableaus import gauss3, implicit_euler, sdirk3

GAMMA = 0.5 + math.cos(math.pi / 18) / math.sqrt(3)


def direct_stability(t, z):
    """1 + z b^T (I - zW)^{-1} e by a dense solve at one point."""
    s = t.stages
    return 1 + z * t.b @ np.linalg.solve(np.eye(s) - z * t.W, np.ones(s))


def test_implicit_euler_stability():
    r = stability_function(implicit_euler())
    assert np.allclose(r.numerator, [1.0])
    assert np.allclose(r.denominator, [1.0, -1.0])
    assert implicit_euler().declared_order_p == 1


@pytest.mark.parametrize("make", [implicit_euler, gauss3, sdirk3])
def test_stability_function_matches_dense_formula(make):
    t = make()
    r = stability_function(t)
    for z in [0.3, -1.7, 2j, -5 + 3j, -80.0, 0.01 - 0.4j]:
        assert r(z) == pytest.approx(direct_stability(t, z), rel=1e-12)


def test_gauss3_abscissae_and_pade():
    t = gauss3()
    expected = [0.5 - math.sqrt(15) / 10, 0.5, 0.5 + math.sqrt(15) / 10]
    assert np.allclose(np.sort(t.c), expected, atol=1e-15)
    r = stability_function(t)
    assert r.degree == 3
    assert np.allclose(r.numerator / r.numerator[0], [1, 1 / 2, 1 / 10, 1 / 120])
    assert np.allclose(r.denominator / r.denominator[0], [1, -1 / 2, 1 / 10, -1 / 120])


def test_sdirk3_denominator_is_cube():
    r = stability_function(sdirk3())
    expected = [1.0, -3 * GAMMA, 3 * GAMMA**2, -GAMMA**3]
    assert np.allclose(r.denominator / r.denominator[0], expected, rtol=1e-13)
    assert sdirk3().is_diagonally_implicit()
    assert not gauss3().is_diagonally_implicit()


@pytest.mark.parametrize("name,p,q", [("implicit_euler", 1, 1), ("gauss3", 6, 3), ("sdirk3", 4, 1)])
def test_orders(name, p, q):
    t = get_tableau(name)
    r = stability_function(t)
    assert approximation_order(r) == p == t.declared_order_p
    assert stage_order(t) == q == t.declared_stage_order_q
    assert is_a_stable(r)


def test_builtin_names():
    assert set(builtin_tableaus()) == {"implicit_euler", "gauss3", "sdirk3"}
    with pytest.raises(UnknownId):
        get_tableau("rk4")


def test_tableau_validation():
    with pytest.raises(ValueError):
        ButcherTableau("bad", [[1.0]], [1.0], [0.5], 1, 1)
    with pytest.raises(ValueError):
        ButcherTableau("bad", [[1.0]], [0.9], [1.0], 1, 1)


def test_tableau_arrays_read_only():
    t = sdirk3()
    with pytest.raises(ValueError):
        t.W[0, 0] = 0.0
