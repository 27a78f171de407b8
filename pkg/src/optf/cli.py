"""Command line interface.

    optf check --input returns.csv
    optf solve --input returns.csv [--output report.json]
    optf grid  --input returns.csv --resolution 100 --fix S3=0.1

Exit codes: 0 success, 1 I/O or parse error, 2 failed admissibility checks,
3 solver stopped at ``--max-iter`` without a certified optimum.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .assumptions import TOL_CONE, TOL_RANK, assumption_report
from .errors import NoLossInColumn, OptfError, ParseError
from .ingest import normalize, parse_returns
from .report import RunReport, input_digest, surface_grid, to_json
from .solver import SolverOptions, solve

log = logging.getLogger("optf")

EXIT_OK, EXIT_IO, EXIT_ASSUMPTIONS, EXIT_MAX_ITER = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is taken by failed checks
    def error(self, message):
        raise _UsageError(message)


def _unit_interval(text: str) -> float:
    x = float(text)
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return x


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return n


def _resolution(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("resolution must be at least 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="optf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--input", "-i", required=True, help="CSV file of absolute returns")
    common.add_argument("--output", "-o", help="write machine output here instead of stdout")
    common.add_argument("--no-header", action="store_true", help="first row is data")
    common.add_argument("--tol-rank", type=_unit_interval, default=TOL_RANK)
    common.add_argument("--tol-cone", type=_unit_interval, default=TOL_CONE)
    common.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("check", parents=[common], help="run the admissibility checks")

    p = sub.add_parser("solve", parents=[common], help="check, then compute the optimal fractions")
    p.add_argument("--tol-grad", type=_unit_interval, default=SolverOptions.tol_grad)
    p.add_argument("--max-iter", type=_positive_int, default=SolverOptions.max_iter)

    p = sub.add_parser("grid", parents=[common], help="TWR over a 2-D slice as CSV")
    p.add_argument("--resolution", type=_resolution, default=100)
    p.add_argument(
        "--fix",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="fix a system's fraction; repeat until two systems remain free",
    )
    return parser


def _workers() -> int:
    raw = os.environ.get("OPTF_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 0:
        raise ValueError("OPTF_THREADS must be a nonnegative integer")
    return n or 1


def _parse_fix(items, names) -> dict:
    fixed = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or name not in names:
            raise _UsageError(f"--fix expects NAME=VALUE with NAME one of {list(names)}, got {item!r}")
        fixed[names.index(name)] = float(value)
    return fixed


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _run(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    T = parse_returns(text, header=False if args.no_header else None)
    log.info("read %d periods x %d systems from %s", T.n_periods, T.n_systems, args.input)

    if args.command == "check":
        report = assumption_report(T, args.tol_rank, args.tol_cone)
        _emit(to_json(report), args.output)
        return EXIT_OK if report.overall else EXIT_ASSUMPTIONS

    if args.command == "solve":
        opts = SolverOptions(tol_grad=args.tol_grad, max_iter=args.max_iter)
        report, result = solve(T, opts, args.tol_rank, args.tol_cone)
        _emit(to_json(RunReport(input_digest(T), report, result)), args.output)
        if result is None:
            log.error("admissibility checks failed; no solution computed")
            return EXIT_ASSUMPTIONS
        if not result.certified:
            log.error("stopped after %d iterations without a certified optimum", result.iterations)
            return EXIT_MAX_ITER
        return EXIT_OK

    fixed = _parse_fix(args.fix, list(T.system_names))
    try:
        R = normalize(T)
    except NoLossInColumn as exc:
        log.error("%s", exc)
        return EXIT_ASSUMPTIONS
    _emit(surface_grid(R, args.resolution, fixed, workers=_workers()), args.output)
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"optf: error: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="optf: %(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return _run(args)
    except (OSError, ParseError, _UsageError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except OptfError as exc:
        log.error("%s", exc)
        return EXIT_IO


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
