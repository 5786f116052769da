"""Rational approximations to ``exp(z)`` and their partial-fraction form.

A :class:`RationalFunction` holds ascending-degree coefficient arrays. The
executable form used by the steppers is :class:`PartialFractionForm`,

    r(z) = r_inf + sum_l sum_{j=1..m_l} r_lj / (1 - z w_l)**j,

which turns ``r(tau A) v`` into ``s = sum_l m_l`` shifted solves
``(I - tau w_l A) x = y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    EvaluationAtPole,
    InvalidRationalFunction,
    OrderExceedsCap,
    PoleInRightHalfClosure,
    RootFindingFailure,
)

#: Maximum degree supported for numerator and denominator.
MAX_DEGREE = 12


def _trim(coeffs: Sequence[complex]) -> np.ndarray:
    c = np.array(coeffs, dtype=complex).ravel()
    if c.size == 0:
        return np.zeros(1, dtype=complex)
    scale = np.max(np.abs(c))
    # drop leading coefficients that are roundoff of an exact zero
    keep = c.size
    while keep > 1 and abs(c[keep - 1]) <= 1e-14 * scale:
        keep -= 1
    return c[:keep]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``numerator(z) / denominator(z)``, coefficients in ascending degree."""

    numerator: np.ndarray
    denominator: np.ndarray

    def __post_init__(self):
        num = _trim(self.numerator)
        den = _trim(self.denominator)
        if den[0] == 0:
            raise InvalidRationalFunction("denominator must not vanish at z = 0")
        if num.size > den.size:
            raise InvalidRationalFunction(
                "numerator degree exceeds denominator degree; "
                "r would be unbounded on Re z <= 0"
            )
        if den.size - 1 > MAX_DEGREE:
            raise InvalidRationalFunction(f"degree above {MAX_DEGREE} is not supported")
        object.__setattr__(self, "numerator", _frozen(num))
        object.__setattr__(self, "denominator", _frozen(den))

    @property
    def degree(self) -> int:
        return self.denominator.size - 1

    def __call__(self, z):
        return evaluate(self, z)

    def at_infinity(self) -> complex:
        if self.numerator.size < self.denominator.size:
            return 0j
        return complex(self.numerator[-1] / self.denominator[-1])

    def poles(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        return np.roots(self.denominator[::-1])

    def __repr__(self):
        return f"RationalFunction(numerator={self.numerator!r}, denominator={self.denominator!r})"


def evaluate(r: RationalFunction, z):
    """Evaluate ``r`` at a scalar or array ``z`` by Horner's rule."""
    z = np.asarray(z, dtype=complex)
    num = P.polyval(z, r.numerator)
    den = P.polyval(z, r.denominator)
    scale = P.polyval(np.abs(z), np.abs(r.denominator))
    if np.any(np.abs(den) <= 1e-15 * scale):
        raise EvaluationAtPole(f"r has a pole at (or extremely near) z = {z}")
    out = num / den
    return complex(out) if out.ndim == 0 else out


def taylor_coefficients(r: RationalFunction, n: int) -> np.ndarray:
    """First ``n`` Taylor coefficients of ``r`` at 0 by power-series division."""
    return _series_divide(r.numerator, r.denominator, n)


def _series_divide(num: np.ndarray, den: np.ndarray, n: int) -> np.ndarray:
    a = np.zeros(n, dtype=complex)
    a[: min(n, num.size)] = num[:n]
    t = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = a[k]
        for i in range(1, min(k, den.size - 1) + 1):
            acc -= den[i] * t[k - i]
        t[k] = acc / den[0]
    return t


def approximation_order(r: RationalFunction, cap: int = 12, rtol: float = 1e-9) -> int:
    """Largest ``p`` with ``r(z) - exp(z) = O(z**(p+1))``.

    Coefficients are compared with ``1/k!`` using a relative tolerance, since
    they shrink factorially and an absolute test would misfire at large ``k``.
    """
    t = taylor_coefficients(r, cap + 2)
    for k in range(cap + 2):
        target = 1.0 / math.factorial(k)
        if abs(t[k] - target) > rtol * target:
            if k == 0:
                raise InvalidRationalFunction(f"r(0) = {t[0]} is not 1")
            return k - 1
    raise OrderExceedsCap(
        f"Taylor coefficients match exp(z) beyond order {cap}; "
        "exact exponential input or tolerance misconfigured?"
    )


@dataclass(frozen=True)
class PoleGroup:
    """One pole ``1/w`` of multiplicity ``m`` and its coefficients ``r_{l,1..m}``."""

    w: complex
    m: int
    coeffs: tuple[complex, ...]


@dataclass(frozen=True, eq=False)
class PartialFractionForm:
    r_inf: complex
    groups: tuple[PoleGroup, ...]
    order_p: int

    @property
    def total_stages_s(self) -> int:
        return sum(g.m for g in self.groups)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.r_inf, dtype=complex)
        for g in self.groups:
            base = 1.0 - z * g.w
            for j, c in enumerate(g.coeffs, start=1):
                out = out + c / base**j
        return complex(out) if out.ndim == 0 else out


def _taylor_shift(coeffs: np.ndarray, z0: complex) -> np.ndarray:
    """Coefficients of ``q(z0 + h)`` in powers of ``h``."""
    c = np.array(coeffs, dtype=complex)
    n = c.size
    # repeated synthetic division
    for k in range(n - 1):
        for i in range(n - 2, k - 1, -1):
            c[i] += z0 * c[i + 1]
    return c


def _cluster_roots(roots: np.ndarray, den: np.ndarray, radius: float = 1e-3,
                   tol: float = 1e-8) -> list[tuple[complex, int]]:
    """Group numerically split multiple roots and check that each group is genuine.

    Companion-matrix eigenvalues split an m-fold root by roughly eps**(1/m),
    so candidates within ``radius`` are merged; a merged group is accepted
    only if its spread is of that roundoff size and the low-order derivatives
    of the denominator vanish at its mean. Distinct but nearly confluent roots
    fail these checks and raise.
    """
    remaining = list(roots)
    groups = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        changed = True
        while changed:
            changed = False
            for z in list(remaining):
                if any(abs(z - y) < radius * max(1.0, abs(y)) for y in members):
                    members.append(z)
                    remaining.remove(z)
                    changed = True
        center = complex(np.mean(members))
        m = len(members)
        if m > 1:
            spread = max(abs(z - center) for z in members)
            if spread > 10 * np.finfo(float).eps ** (1.0 / m) * max(1.0, abs(center)):
                raise RootFindingFailure(
                    f"{m} denominator roots near {center:.6g} are {spread:.2e} apart: "
                    "nearly confluent but not a multiple root"
                )
            shifted = _taylor_shift(den, center)
            scale = np.sum(np.abs(den) * max(1.0, abs(center)) ** np.arange(den.size))
            if np.any(np.abs(shifted[:m]) > tol * scale):
                raise RootFindingFailure(
                    f"{m} denominator roots near {center:.6g} are nearly confluent "
                    "but not a genuine multiple root"
                )
        groups.append((center, m))
    return groups


def _symmetrize(poles: list[tuple[complex, int]]) -> list[tuple[complex, int]]:
    """Snap roots of a real polynomial onto the real axis or into exact conjugate pairs."""
    out = []
    for z, m in poles:
        if abs(z.imag) <= 1e-10 * abs(z):
            out.append((complex(z.real), m))
        elif z.imag > 0:
            out.append((z, m))
            out.append((z.conjugate(), m))
    if len(out) != len(poles):
        raise RootFindingFailure("roots of a real denominator are not conjugate-symmetric")
    return out


def partial_fractions(r: RationalFunction, residual_tol: float = 1e-8) -> PartialFractionForm:
    """Develop ``r`` into simple fractions in powers of ``1/(1 - z w)``.

    The coefficients at each (possibly multiple) pole come from the Laurent
    expansion of ``N/Q`` where ``Q`` is the denominator with that pole
    removed. The result is checked against ``r`` on sample points.
    """
    order = approximation_order(r)
    if order < 1:
        raise InvalidRationalFunction("r must approximate exp(z) to order >= 1")
    den = np.array(r.denominator)
    num = np.array(r.numerator)
    if r.degree == 0:
        raise InvalidRationalFunction("r has no poles; a constant cannot approximate exp")

    poles = _cluster_roots(r.poles(), den)
    real_data = not np.any(num.imag) and not np.any(den.imag)
    if real_data:
        poles = _symmetrize(poles)
    lead = den[-1]

    groups = []
    for idx, (z0, m) in enumerate(poles):
        w = 1.0 / z0
        if w.real <= 0:
            raise PoleInRightHalfClosure(f"pole {z0} gives Re(w) = {w.real} <= 0")
        q = np.array([lead], dtype=complex)
        for jdx, (z1, m1) in enumerate(poles):
            if jdx != idx:
                for _ in range(m1):
                    q = P.polymul(q, [-z1, 1.0])
        g = _series_divide(_taylor_shift(num, z0), _taylor_shift(q, z0), m)
        # coefficient of (z - z0)**(-j) is g[m - j]; (1 - z w)**j = (-w)**j (z - z0)**j
        coeffs = [complex(g[m - j] * (-w) ** j) for j in range(1, m + 1)]
        if real_data and z0.imag == 0:
            coeffs = [complex(c.real) for c in coeffs]
        groups.append(PoleGroup(w=complex(w), m=m, coeffs=tuple(coeffs)))

    groups.sort(key=lambda g: (round(g.w.real, 12), g.w.imag))
    pf = PartialFractionForm(r_inf=r.at_infinity(), groups=tuple(groups), order_p=order)

    radius = 0.5 * min(1.0 / abs(g.w) for g in groups)
    sample = radius * np.exp(2j * np.pi * (np.arange(16) + 0.5) / 16)
    # poles sit in Re z > 0, so the closed left half-plane is always safe
    far = -np.linspace(0.0, 20.0, 9) + 1j * np.linspace(-20.0, 20.0, 9)
    sample = np.concatenate([sample, far])
    exact = evaluate(r, sample)
    err = np.abs(pf(sample) - exact) / (1 + np.abs(exact))
    if np.max(err) > residual_tol:
        raise RootFindingFailure(
            f"partial-fraction reconstruction residual {np.max(err):.3e} exceeds {residual_tol}"
        )
    return pf


def tau_threshold(pf: PartialFractionForm, omega: float) -> float:
    """Largest admissible step size for a generator with growth bound ``omega``."""
    if omega <= 0:
        return math.inf
    return min((1.0 / g.w).real for g in pf.groups) / omega


def is_a_stable(r: RationalFunction, tol: float = 1e-10, n_samples: int = 4000) -> bool:
    """Numerical A-stability check: poles in Re z > 0 and ``|r(iy)| <= 1``.

    By the maximum modulus principle the imaginary axis and infinity are
    enough once there are no poles in the closed left half-plane. This
    samples, it does not prove.
    """
    poles = r.poles()
    if np.any(poles.real <= 0):
        return False
    y = np.concatenate([[0.0], np.logspace(-4, 8, n_samples)])
    y = np.concatenate([y, -y])
    if np.max(np.abs(evaluate(r, 1j * y))) > 1 + tol:
        return False
    return abs(r.at_infinity()) <= 1 + tol
