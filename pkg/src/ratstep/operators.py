"""Linear operators ``A_h`` supporting ``apply`` and shifted solves ``(I - tau w A) x = y``.

Four storage structures are supported: dense, lower-bidiagonal (upwind
advection), tridiagonal (1D Laplacian) and the 2D five-point Laplacian.
Shifted solves run in complex arithmetic; factorizations are cached per
``(w, tau)`` since a rational method reuses the same few shifts every step.
The cache is guarded by a lock, so one operator may be shared by
concurrent integrations.

2D unknowns are ordered row-major: index ``(i - 1) * (M - 1) + (j - 1)``
holds the value at ``(x_i, y_j)``.
"""

from __future__ import annotations

import threading

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, SingularShift

STRUCTURES = ("dense", "lower-bidiagonal", "tridiagonal", "five-point-2D")


class FactorizationCache:
    """Thread-safe map from ``(w, tau)`` to a reusable factorization."""

    def __init__(self):
        self._store = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_or_create(self, key, factory):
        with self._lock:
            fac = self._store.get(key)
            if fac is not None:
                self.hits += 1
                return fac
        fac = factory()
        with self._lock:
            # another thread may have raced us; keep the first one stored
            fac = self._store.setdefault(key, fac)
            self.misses += 1
        return fac

    def clear(self):
        with self._lock:
            self._store.clear()

    def __len__(self):
        return len(self._store)


class _Thomas:
    """LU factors of a tridiagonal matrix (no pivoting; fine for these diagonally dominant shifts)."""

    def __init__(self, lower, diag, upper):
        n = diag.size
        self.lower = lower
        self.upper = upper
        self.mult = np.zeros(max(n - 1, 0), dtype=complex)
        self.piv = np.array(diag, dtype=complex)
        for i in range(1, n):
            if self.piv[i - 1] == 0:
                raise SingularShift("zero pivot in tridiagonal factorization")
            self.mult[i - 1] = lower[i - 1] / self.piv[i - 1]
            self.piv[i] -= self.mult[i - 1] * upper[i - 1]
        if n and self.piv[-1] == 0:
            raise SingularShift("zero pivot in tridiagonal factorization")

    def solve(self, rhs):
        y = np.array(rhs, dtype=complex)
        n = y.size
        for i in range(1, n):
            y[i] -= self.mult[i - 1] * y[i - 1]
        y[-1] /= self.piv[-1]
        for i in range(n - 2, -1, -1):
            y[i] = (y[i] - self.upper[i] * y[i + 1]) / self.piv[i]
        return y


class _LowerBidiagonal:
    def __init__(self, lower, diag):
        if np.any(diag == 0):
            raise SingularShift("zero diagonal in bidiagonal system")
        self.lower = lower
        self.diag = diag

    def solve(self, rhs):
        y = np.array(rhs, dtype=complex)
        y[0] /= self.diag[0]
        for i in range(1, y.size):
            y[i] = (y[i] - self.lower[i - 1] * y[i - 1]) / self.diag[i]
        return y


class _DenseLU:
    def __init__(self, M):
        lu, piv = sla.lu_factor(M, check_finite=False)
        if np.any(np.diag(lu) == 0):
            raise SingularShift("singular shifted matrix")
        self.lu = (lu, piv)

    def solve(self, rhs):
        return sla.lu_solve(self.lu, rhs, check_finite=False)


class _SparseLU:
    def __init__(self, M):
        try:
            self.lu = spla.splu(M.tocsc())
        except RuntimeError as exc:
            raise SingularShift(str(exc)) from exc

    def solve(self, rhs):
        return self.lu.solve(np.asarray(rhs, dtype=complex))


class ShiftedSolveOperator:
    """Real operator ``A_h`` with structure-aware apply and cached shifted solves.

    ``entries`` depends on ``structure``:

    * ``"dense"``: the full matrix;
    * ``"lower-bidiagonal"``: ``(diag, lower)`` with ``lower`` of length ``n - 1``;
    * ``"tridiagonal"``: ``(lower, diag, upper)``;
    * ``"five-point-2D"``: a scipy sparse matrix.

    ``omega`` is the growth bound of the generated semigroup; it only feeds
    the step-size threshold.
    """

    def __init__(self, structure: str, entries, omega: float = 0.0, cache: bool = True):
        if structure not in STRUCTURES:
            raise ValueError(f"unknown structure {structure!r}")
        self.structure = structure
        self.omega = float(omega)
        self.caching = cache
        self.cache = FactorizationCache()
        self.solve_count = 0
        self._count_lock = threading.Lock()
        if structure == "dense":
            self.entries = np.array(entries, dtype=float)
            self.dimension = self.entries.shape[0]
        elif structure == "lower-bidiagonal":
            diag, lower = entries
            self.entries = (np.asarray(diag, float), np.asarray(lower, float))
            self.dimension = self.entries[0].size
        elif structure == "tridiagonal":
            lower, diag, upper = entries
            self.entries = tuple(np.asarray(a, float) for a in (lower, diag, upper))
            self.dimension = self.entries[1].size
        else:
            self.entries = sp.csr_matrix(entries, dtype=float)
            self.dimension = self.entries.shape[0]

    def __repr__(self):
        return f"ShiftedSolveOperator({self.structure!r}, dimension={self.dimension})"

    def apply(self, v):
        v = np.asarray(v)
        if v.shape != (self.dimension,):
            raise DimensionMismatch(f"expected vector of length {self.dimension}, got {v.shape}")
        if self.structure == "dense":
            return self.entries @ v
        if self.structure == "lower-bidiagonal":
            diag, lower = self.entries
            out = diag * v
            out[1:] += lower * v[:-1]
            return out
        if self.structure == "tridiagonal":
            lower, diag, upper = self.entries
            out = diag * v
            out[1:] += lower * v[:-1]
            out[:-1] += upper * v[1:]
            return out
        return self.entries @ v

    def to_dense(self) -> np.ndarray:
        n = self.dimension
        if self.structure == "dense":
            return self.entries.copy()
        if self.structure == "lower-bidiagonal":
            diag, lower = self.entries
            return np.diag(diag) + np.diag(lower, -1)
        if self.structure == "tridiagonal":
            lower, diag, upper = self.entries
            return np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
        return self.entries.toarray().reshape(n, n)

    def _factorize(self, w: complex, tau: float):
        shift = tau * complex(w)
        if self.structure == "dense":
            return _DenseLU(np.eye(self.dimension) - shift * self.entries)
        if self.structure == "lower-bidiagonal":
            diag, lower = self.entries
            return _LowerBidiagonal(-shift * lower, 1.0 - shift * diag)
        if self.structure == "tridiagonal":
            lower, diag, upper = self.entries
            return _Thomas(-shift * lower, 1.0 - shift * diag, -shift * upper)
        M = sp.identity(self.dimension, dtype=complex, format="csc") - shift * self.entries
        return _SparseLU(M)

    def solve_shifted(self, w: complex, tau: float, rhs):
        """Solve ``(I - tau * w * A) x = rhs`` in complex arithmetic."""
        rhs = np.asarray(rhs, dtype=complex)
        if rhs.shape != (self.dimension,):
            raise DimensionMismatch(f"expected rhs of length {self.dimension}, got {rhs.shape}")
        if tau <= 0:
            raise ValueError("tau must be positive")
        key = (complex(w), float(tau))
        if self.caching:
            fac = self.cache.get_or_create(key, lambda: self._factorize(w, tau))
        else:
            fac = self._factorize(w, tau)
        with self._count_lock:
            self.solve_count += 1
        x = fac.solve(rhs)
        if not np.all(np.isfinite(x)):
            raise SingularShift(f"non-finite solution for shift w={w}, tau={tau}")
        return x


def apply(op: ShiftedSolveOperator, v):
    return op.apply(v)


def solve_shifted(op: ShiftedSolveOperator, w: complex, tau: float, rhs):
    return op.solve_shifted(w, tau, rhs)


def dense_operator(A, omega: float = 0.0) -> ShiftedSolveOperator:
    return ShiftedSolveOperator("dense", A, omega=omega)


def make_upwind_1d(M: int) -> ShiftedSolveOperator:
    """``-d/dx`` by first-order upwinding on ``x_i = i/M``, ``i = 1..M``, inflow ``u_0 = 0``."""
    if M < 2:
        raise ValueError("M must be at least 2")
    h = 1.0 / M
    return ShiftedSolveOperator(
        "lower-bidiagonal", (np.full(M, -1.0 / h), np.full(M - 1, 1.0 / h))
    )


def make_heat_1d(M: int) -> ShiftedSolveOperator:
    """Centered ``d^2/dx^2`` on the ``M - 1`` interior nodes, zero Dirichlet data."""
    if M < 2:
        raise ValueError("M must be at least 2")
    h = 1.0 / M
    n = M - 1
    off = np.full(n - 1, 1.0 / h**2)
    return ShiftedSolveOperator("tridiagonal", (off, np.full(n, -2.0 / h**2), off.copy()))


def make_heat_2d(M: int) -> ShiftedSolveOperator:
    """Five-point Laplacian on the ``(M - 1)**2`` interior nodes of the unit square."""
    if M < 2:
        raise ValueError("M must be at least 2")
    h = 1.0 / M
    n = M - 1
    T = sp.diags([np.ones(n - 1), -2.0 * np.ones(n), np.ones(n - 1)], [-1, 0, 1])
    I = sp.identity(n)
    L = (sp.kron(T, I) + sp.kron(I, T)) / h**2
    return ShiftedSolveOperator("five-point-2D", L.tocsr())
