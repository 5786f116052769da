"""Command line interface: ``run``, ``reproduce`` and ``check``.

Exit status is 0 on success, 1 when a check or invariant fails and 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checks import run_checks
from .convergence import (
    FORMATS, METHODS, SCHEMES, TABLES, SweepSpec, error_markdown, reproduce, run_sweep,
    to_csv, to_markdown,
)
from .errors import RatstepError
from .testbeds import NORMS, PROBLEMS

CONFIG_KEYS = {"problem", "method", "scheme", "grid", "steps", "format", "out", "norm"}


def read_config(path) -> dict:
    """Parse ``key = value`` (or ``key: value``) lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split(sep, 1))
        key = key.lower()
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_steps(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.replace(" ", "").split(",") if s)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratstep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one convergence sweep")
    run.add_argument("--config", help="file with one 'key = value' per line; flags override it")
    run.add_argument("--problem", choices=sorted(PROBLEMS))
    run.add_argument("--method", choices=METHODS)
    run.add_argument("--scheme", choices=SCHEMES)
    run.add_argument("--grid", type=int, help="number of space subdivisions M (default 100)")
    run.add_argument("--steps", help="comma-separated ascending step counts N")
    run.add_argument("--format", choices=FORMATS)
    run.add_argument("--norm", choices=NORMS, help="error norm (default depends on the problem)")
    run.add_argument("--out", help="write the report here instead of stdout")

    rep = sub.add_parser("reproduce", help="recompute a table of observed orders")
    rep.add_argument("--table", required=True, choices=sorted(TABLES))
    rep.add_argument("--grid", type=int, default=100)
    rep.add_argument("--out", help="directory for <table>.csv and <table>.md")

    sub.add_parser("check", help="run the built-in property checks")
    return parser


def _monotone(report, floor_marker="*") -> bool:
    """Errors decrease with N until the first floor marker."""
    for prev, row in zip(report.rows, report.rows[1:]):
        if row.order == floor_marker:
            break
        if not row.error < prev.error:
            return False
    return True


def _cmd_run(args, parser) -> int:
    try:
        values = read_config(args.config) if args.config else {}
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    for key in ("problem", "method", "scheme", "format", "out", "norm"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    if args.grid is not None:
        values["grid"] = args.grid
    if args.steps is not None:
        values["steps"] = args.steps
    missing = [k for k in ("problem", "method", "scheme", "steps") if k not in values]
    if missing:
        parser.error(f"run: missing {', '.join('--' + k for k in missing)}")
    try:
        spec = SweepSpec(
            problem=values["problem"], method=values["method"], scheme=values["scheme"],
            steps=_parse_steps(str(values["steps"])), M=int(values.get("grid", 100)),
            format=values.get("format", "csv"), norm=values.get("norm"),
        )
    except (ValueError, KeyError) as exc:
        parser.error(str(exc))
    report = run_sweep(spec)
    text = to_csv(report) if spec.format == "csv" else to_markdown(report, skip_first=False)
    if values.get("out"):
        Path(values["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    if spec.scheme == "rational" and not _monotone(report):
        print("error: errors do not decrease with N", file=sys.stderr)
        return 1
    return 0


def _cmd_reproduce(args) -> int:
    reports = reproduce(args.table, M=args.grid)
    md = to_markdown(reports) + "\nErrors:\n\n" + error_markdown(reports)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.table}.csv").write_text(to_csv(reports))
        (out / f"{args.table}.md").write_text(md)
    sys.stdout.write(md)
    ok = all(_monotone(r) for r in reports if r.scheme == "rational")
    if not ok:
        print("error: a rational sweep is not monotone before the floor", file=sys.stderr)
    return 0 if ok else 1


def _cmd_check() -> int:
    results = run_checks()
    for name, passed, detail in results:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    return 0 if all(r[1] for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, parser)
        if args.command == "reproduce":
            return _cmd_reproduce(args)
        return _cmd_check()
    except RatstepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
