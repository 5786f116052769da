"""Convergence sweeps, observed orders and table output.

Step counts ``N`` are used throughout (``tau = 1/N``, ``T = 1``), and table
columns are labelled by ``N``.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveError, UnknownId
from .steppers import prepare_rational, rational_integrate, rk_integrate
from .tableaus import get_tableau
from .testbeds import PROBLEMS, make_problem

SCHEMES = ("rational", "rk")
METHODS = ("implicit_euler", "gauss3", "sdirk3")
FORMATS = ("csv", "markdown")
MARKER = "*"
CSV_COLUMNS = ["problem", "method", "scheme", "M", "N", "tau", "error", "order"]


@dataclass(frozen=True)
class SweepSpec:
    problem: str
    method: str
    scheme: str
    steps: tuple[int, ...]
    M: int = 100
    format: str = "csv"
    norm: str | None = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise UnknownId(f"unknown problem {self.problem!r}")
        if self.method not in METHODS:
            raise UnknownId(f"unknown method {self.method!r}")
        if self.scheme not in SCHEMES:
            raise UnknownId(f"unknown scheme {self.scheme!r}")
        if self.format not in FORMATS:
            raise UnknownId(f"unknown format {self.format!r}")
        steps = tuple(int(n) for n in self.steps)
        if not steps or any(n < 1 for n in steps) or list(steps) != sorted(set(steps)):
            raise ValueError("step counts must be positive and strictly ascending")
        object.__setattr__(self, "steps", steps)


@dataclass
class ReportRow:
    N: int
    tau: float
    error: float
    order: float | str | None = None


@dataclass
class ConvergenceReport:
    problem: str
    method: str
    scheme: str
    M: int
    rows: list[ReportRow]
    wall_time: float = field(default=0.0, compare=False)
    norm: str = field(default="l2", compare=False)

    @property
    def Ns(self) -> list[int]:
        return [r.N for r in self.rows]

    @property
    def errors(self) -> list[float]:
        return [r.error for r in self.rows]

    @property
    def orders(self) -> list:
        return [r.order for r in self.rows]

    def order_at(self, N: int):
        for r in self.rows:
            if r.N == N:
                return r.order
        raise KeyError(N)


def estimate_orders(errors, Ns, floor: float = 1e-12, stall: float = 1e-11) -> list:
    """Observed orders ``ln(e_{k-1}/e_k) / ln(N_k/N_{k-1})``, attributed to ``N_k``.

    The first entry is ``None``. An entry becomes ``"*"`` when its error is
    below ``floor`` or when it fails to decrease while already below ``stall``.
    """
    if len(errors) != len(Ns) or len(errors) < 2:
        raise ValueError("need at least two (error, N) pairs of equal length")
    errors = [float(e) for e in errors]
    if any(not e > 0 for e in errors):
        raise NonPositiveError("errors must be strictly positive")
    out = [None]
    for k in range(1, len(errors)):
        e0, e1 = errors[k - 1], errors[k]
        if e1 < floor or (e1 >= e0 and e1 < stall):
            out.append(MARKER)
        else:
            out.append(math.log(e0 / e1) / math.log(Ns[k] / Ns[k - 1]))
    return out


def precision_floor(problem, factor: float = 100.0) -> tuple[float, float]:
    """Error floor and stall level tied to the size of the exact solution at ``T``."""
    scale = problem.norm(problem.exact(problem.T))
    floor = factor * np.finfo(float).eps * scale
    return floor, 10.0 * floor


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RATSTEP_THREADS", "")))
    except ValueError:
        return os.cpu_count() or 1


def run_sweep(spec: SweepSpec, floor: float | None = None, threads: int | None = None) -> ConvergenceReport:
    """Integrate for each step count in ``spec`` and report errors and orders at ``T = 1``."""
    start = time.perf_counter()
    problem = make_problem(spec.problem, spec.M)
    if spec.norm is not None:
        problem = problem.with_norm(spec.norm)
    tableau = get_tableau(spec.method)
    if spec.scheme == "rational":
        pf, gamma = prepare_rational(tableau)

        def integrate(N):
            return rational_integrate(problem, pf, gamma, N).u
    else:
        def integrate(N):
            return rk_integrate(problem, tableau, N).u

    def error(N):
        return problem.error(integrate(N))

    threads = _threads() if threads is None else threads
    if threads > 1 and len(spec.steps) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errs = list(pool.map(error, spec.steps))
    else:
        errs = [error(N) for N in spec.steps]

    if floor is None:
        floor, stall = precision_floor(problem)
    else:
        stall = 10.0 * floor
    orders = (estimate_orders(errs, spec.steps, floor=floor, stall=stall)
              if len(errs) > 1 else [None])
    rows = [ReportRow(N=N, tau=1.0 / N, error=float(e), order=o) for N, e, o in zip(spec.steps, errs, orders)]
    return ConvergenceReport(spec.problem, spec.method, spec.scheme, spec.M, rows,
                             wall_time=time.perf_counter() - start, norm=problem.norm_kind)


# Each table: problem, step counts (the first one only supplies a predecessor), rows.
TABLES = {
    "T1": ("heat1d", (10, 20, 40, 80, 160, 320),
           [("gauss3", "rational"), ("gauss3", "rk"), ("sdirk3", "rational"), ("sdirk3", "rk")]),
    "T2": ("heat2d", (15, 30, 45, 60, 75, 90), [("gauss3", "rational"), ("gauss3", "rk")]),
    "T3": ("heat2d", (20, 40, 80, 160, 320, 640), [("sdirk3", "rational"), ("sdirk3", "rk")]),
    "T5": ("advection", (80, 160, 240, 320, 400, 480), [("sdirk3", "rational"), ("sdirk3", "rk")]),
}


def reproduce(table: str, M: int = 100, threads: int | None = None) -> list[ConvergenceReport]:
    try:
        problem, steps, rows = TABLES[table]
    except KeyError:
        raise UnknownId(f"unknown table {table!r}; choose from {sorted(TABLES)}") from None
    return [run_sweep(SweepSpec(problem, method, scheme, steps, M=M), threads=threads)
            for method, scheme in rows]


def _fmt_order(o) -> str:
    if o is None:
        return ""
    if o == MARKER:
        return MARKER
    return f"{o:.2f}"


def to_csv(reports) -> str:
    if isinstance(reports, ConvergenceReport):
        reports = [reports]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        for r in rep.rows:
            order = "" if r.order is None else (MARKER if r.order == MARKER else repr(float(r.order)))
            writer.writerow([rep.problem, rep.method, rep.scheme, rep.M, r.N,
                             repr(float(r.tau)), repr(float(r.error)), order])
    return buf.getvalue()


def from_csv(text: str) -> list[ConvergenceReport]:
    """Parse the output of :func:`to_csv` back into reports (grouped in order of appearance)."""
    reports: dict[tuple, ConvergenceReport] = {}
    for rec in csv.DictReader(io.StringIO(text)):
        key = (rec["problem"], rec["method"], rec["scheme"], int(rec["M"]))
        if key not in reports:
            reports[key] = ConvergenceReport(*key, rows=[])
        o = rec["order"]
        order = None if o == "" else (MARKER if o == MARKER else float(o))
        reports[key].rows.append(ReportRow(int(rec["N"]), float(rec["tau"]), float(rec["error"]), order))
    return list(reports.values())


_LABELS = {"gauss3": "Gauss3", "sdirk3": "SDIRK3", "implicit_euler": "Implicit Euler"}


def to_markdown(reports, skip_first: bool = True) -> str:
    """Orders laid out one row per (method, scheme), one column per step count."""
    if isinstance(reports, ConvergenceReport):
        reports = [reports]
    Ns = reports[0].Ns[1:] if skip_first else reports[0].Ns
    head = f"{reports[0].problem}, M = {reports[0].M}, norm = {reports[0].norm}"
    lines = [head, "",
             "| Method | Version | " + " | ".join(f"N = {N}" for N in Ns) + " |",
             "|---|---|" + "---:|" * len(Ns)]
    prev = None
    for rep in reports:
        label = _LABELS.get(rep.method, rep.method) if rep.method != prev else ""
        prev = rep.method
        version = "Rational" if rep.scheme == "rational" else "RK"
        cells = [_fmt_order(rep.order_at(N)) for N in Ns]
        lines.append(f"| {label} | {version} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def error_markdown(reports) -> str:
    if isinstance(reports, ConvergenceReport):
        reports = [reports]
    Ns = reports[0].Ns
    lines = ["| Method | Version | " + " | ".join(f"N = {N}" for N in Ns) + " |",
             "|---|---|" + "---:|" * len(Ns)]
    for rep in reports:
        cells = [f"{e:.3e}" for e in rep.errors]
        lines.append(f"| {rep.method} | {rep.scheme} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
