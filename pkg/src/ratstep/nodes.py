"""Node schedules and the weights that replace resolvents of the shift generator.

For ``F(z) = (1 - w z)**(-j)`` and distinct nodes ``c``, the weights ``gamma``
solve the moment system

    sum_m gamma_m c_m**k = k! F_k,    k = 0..p-1,

so that ``gamma . v(t + tau c)`` reproduces ``[F(tau d/dt) v](t)`` exactly for
polynomials ``v`` of degree below ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedNodes
from .rational import PartialFractionForm


def node_schedule(n: int, p: int) -> np.ndarray:
    """Offsets ``c_n`` (in units of tau) at which the source is sampled in step ``n``.

    Steps ``0 <= n <= p-1`` reuse the grid ``{0, tau, ..., (p-1) tau}``; later
    steps use the trailing window ``t_{n-p+1}, ..., t_n``.
    """
    if n < 0 or p < 1:
        raise ValueError("need n >= 0 and p >= 1")
    if n <= p - 1:
        return np.arange(-n, p - n, dtype=float)
    return np.arange(-p + 1, 1, dtype=float)


def schedule_index(n: int, p: int) -> int:
    """Key of the distinct node vector used in step ``n``."""
    return min(n, p - 1)


def resolvent_taylor(w: complex, j: int, p: int) -> np.ndarray:
    """First ``p`` Taylor coefficients of ``(1 - w z)**(-j)``."""
    if j < 1:
        raise ValueError("power j must be >= 1")
    return np.array([math.comb(j + k - 1, k) * complex(w) ** k for k in range(p)], dtype=complex)


def solve_vandermonde_moments(c, rhs) -> np.ndarray:
    """Solve ``sum_m c_m**k x_m = rhs_k`` for ``k = 0..n-1`` in O(n^2).

    Björck-Pereyra recurrence for the dual Vandermonde system (Golub & Van
    Loan, Algorithm 4.6.2).
    """
    x = np.asarray(c, dtype=float)
    b = np.array(rhs, dtype=complex)
    n = x.size - 1
    for k in range(n):
        for i in range(n, k, -1):
            b[i] -= x[k] * b[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            b[i] /= x[i] - x[i - k - 1]
        for i in range(k, n):
            b[i] -= b[i + 1]
    return b


def gamma_weights(F, c, rtol: float = 1e-10) -> np.ndarray:
    """Weights ``gamma`` with ``sum_m gamma_m c_m**k = k! F_k``, residual-checked."""
    F = np.asarray(F, dtype=complex)
    c = np.asarray(c, dtype=float)
    p = c.size
    if F.size != p:
        raise ValueError("need as many Taylor coefficients as nodes")
    if np.unique(c).size != p:
        raise IllConditionedNodes("nodes must be pairwise distinct")
    moments = F * np.array([math.factorial(k) for k in range(p)])
    gamma = solve_vandermonde_moments(c, moments)
    V = np.vander(c, p, increasing=True).T
    residual = np.max(np.abs(V @ gamma - moments), initial=0.0)
    if residual > rtol * max(1.0, np.max(np.abs(moments))):
        raise IllConditionedNodes(f"Vandermonde residual {residual:.3e} too large")
    return gamma


@dataclass(frozen=True, eq=False)
class GammaTable:
    """``weights[k][l][i-1]`` is the length-``p`` vector for schedule ``k``, group ``l``, power ``i``."""

    p: int
    nodes: tuple[np.ndarray, ...]
    weights: tuple[tuple[np.ndarray, ...], ...]

    def for_step(self, n: int):
        k = schedule_index(n, self.p)
        return self.nodes[k], self.weights[k]

    def __len__(self):
        return sum(w.shape[0] for sched in self.weights for w in sched)


def build_gamma_table(pf: PartialFractionForm, p: int | None = None) -> GammaTable:
    """Precompute weights for every distinct schedule and every pole power."""
    p = pf.order_p if p is None else p
    nodes = []
    weights = []
    for k in range(p):
        c = node_schedule(k, p)
        c.setflags(write=False)
        nodes.append(c)
        per_group = []
        for g in pf.groups:
            block = np.array([gamma_weights(resolvent_taylor(g.w, i, p), c) for i in range(1, g.m + 1)])
            block.setflags(write=False)
            per_group.append(block)
        weights.append(tuple(per_group))
    return GammaTable(p=p, nodes=tuple(nodes), weights=tuple(weights))
