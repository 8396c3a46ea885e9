"""Command-line verification harness.

Runs the selected identity suites on seeded random instances and emits a
residual report.  Exit codes: 0 all suites pass, 1 identity failure,
2 usage error.
"""
from __future__ import annotations

import argparse
import sys

from .randgen import DEFAULT_DEGREE, DEFAULT_TOL, DEFAULT_TRIALS, SUITE_NAMES, SuiteConfig
from .verify import emit_report, run_suite

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="extensorfields-verify",
        description="Verify the exterior-algebra, covariant-derivative, deformation "
        "and frame-split identities on seeded random instances.",
    )
    p.add_argument("--dim", type=int, default=3, help="chart dimension n, 2..4 (default 3)")
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed (default 0)")
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE, help="max polynomial degree (default 3)")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="trials per suite (default 100)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative residual tolerance (default 1e-8)")
    p.add_argument(
        "--suite",
        default="all",
        help="comma-separated suite names from {%s} or 'all' (default all)" % ",".join(SUITE_NAMES),
    )
    p.add_argument("--format", choices=("json", "text"), default="text", help="report format (default text)")
    p.add_argument("--out", default=None, help="write the report to this path instead of stdout")
    return p


def parse_suites(arg: str):
    names = tuple(s.strip() for s in arg.split(",") if s.strip())
    if "all" in names:
        return SUITE_NAMES
    return names


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help; pass both through
        return int(exc.code or 0)
    cfg = SuiteConfig(
        dim=ns.dim,
        seed=ns.seed,
        degree=ns.degree,
        trials=ns.trials,
        tol=ns.tol,
        suites=parse_suites(ns.suite),
    )
    try:
        cfg.validate()
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = run_suite(cfg)
    rendered = emit_report(report, ns.format)
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return EXIT_PASS if report.all_passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
