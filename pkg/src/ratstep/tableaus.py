"""Butcher tableaus of the implicit Runge-Kutta methods and their stability functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .rational import RationalFunction


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Implicit RK method ``(W, b, c)`` with declared order ``p`` and stage order ``q``."""

    name: str
    W: np.ndarray
    b: np.ndarray
    c: np.ndarray
    declared_order_p: int
    declared_stage_order_q: int

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        b = np.array(self.b, dtype=float)
        c = np.array(self.c, dtype=float)
        s = b.size
        if W.shape != (s, s) or c.shape != (s,):
            raise ValueError("tableau shapes do not match")
        if np.max(np.abs(W.sum(axis=1) - c)) > 1e-12:
            raise ValueError(f"{self.name}: row sums of W differ from c")
        if abs(b.sum() - 1.0) > 1e-12:
            raise ValueError(f"{self.name}: weights do not sum to 1")
        for a in (W, b, c):
            a.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def stages(self) -> int:
        return self.b.size

    def is_diagonally_implicit(self) -> bool:
        return bool(np.all(np.triu(self.W, 1) == 0.0))


def _poly_det(M: list[list[np.ndarray]]) -> np.ndarray:
    """Determinant of a matrix of polynomials by cofactor expansion along row 0."""
    n = len(M)
    if n == 1:
        return M[0][0]
    det = np.zeros(1)
    for j in range(n):
        if not np.any(M[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = P.polymul(M[0][j], _poly_det(minor))
        det = P.polyadd(det, term if j % 2 == 0 else -term)
    return det


def _affine_det(C: np.ndarray) -> np.ndarray:
    """Coefficients of det(I + z C) in ascending powers of z."""
    s = C.shape[0]
    M = [[np.array([float(i == j), C[i, j]]) for j in range(s)] for i in range(s)]
    return _poly_det(M)


def stability_function(t: ButcherTableau) -> RationalFunction:
    """``r(z) = 1 + z b^T (I - zW)^{-1} e`` as an explicit polynomial ratio.

    Uses ``r(z) = det(I - zW + z e b^T) / det(I - zW)``.
    """
    e = np.ones(t.stages)
    num = _affine_det(-t.W + np.outer(e, t.b))
    den = _affine_det(-t.W)
    return RationalFunction(num, den)


def stage_order(t: ButcherTableau, tol: float = 1e-10, cap: int = 20) -> int:
    """Largest ``q`` with ``W c**(k-1) = c**k / k`` for ``k = 1..q``."""
    q = 0
    for k in range(1, cap + 1):
        lhs = t.W @ t.c ** (k - 1)
        if np.max(np.abs(lhs - t.c**k / k)) > tol:
            break
        q = k
    return q


def implicit_euler() -> ButcherTableau:
    return ButcherTableau("implicit_euler", [[1.0]], [1.0], [1.0], 1, 1)


def gauss3() -> ButcherTableau:
    """3-stage Gauss-Legendre collocation method, order 6, stage order 3."""
    r = math.sqrt(15.0)
    W = [
        [5 / 36, 2 / 9 - r / 15, 5 / 36 - r / 30],
        [5 / 36 + r / 24, 2 / 9, 5 / 36 - r / 24],
        [5 / 36 + r / 30, 2 / 9 + r / 15, 5 / 36],
    ]
    b = [5 / 18, 4 / 9, 5 / 18]
    c = [0.5 - r / 10, 0.5, 0.5 + r / 10]
    return ButcherTableau("gauss3", W, b, c, 6, 3)


def sdirk3() -> ButcherTableau:
    """Crouzeix's 3-stage, order-4 A-stable SDIRK (Hairer & Wanner II, Table IV.6.4).

    Diagonal ``gamma = 1/2 + cos(pi/18)/sqrt(3)``; stage order 1.
    """
    gamma = 0.5 + math.cos(math.pi / 18) / math.sqrt(3.0)
    delta = 1.0 / (6.0 * (2.0 * gamma - 1.0) ** 2)
    W = [
        [gamma, 0.0, 0.0],
        [0.5 - gamma, gamma, 0.0],
        [2.0 * gamma, 1.0 - 4.0 * gamma, gamma],
    ]
    b = [delta, 1.0 - 2.0 * delta, delta]
    c = [gamma, 0.5, 1.0 - gamma]
    return ButcherTableau("sdirk3", W, b, c, 4, 1)


_BUILTINS = {"implicit_euler": implicit_euler, "gauss3": gauss3, "sdirk3": sdirk3}


def builtin_tableaus() -> dict[str, ButcherTableau]:
    return {name: make() for name, make in _BUILTINS.items()}


def get_tableau(name: str) -> ButcherTableau:
    from .errors import UnknownId

    try:
        return _BUILTINS[name]()
    except KeyError:
        raise UnknownId(f"unknown method {name!r}; choose from {sorted(_BUILTINS)}") from None
