"""Command line driver: ``vessiot FILE [options]``.

Exit codes: 0 on success, 1 on input or configuration errors, 2 on internal
defects.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence, TextIO

from .jet import prolong
from .parsing import ParseError, parse_system_file
from .pgauss import InternalDefect
from .report import ReportDocument, serialize_report
from .singular import real_singularities
from .smtlib import DEFAULT_TIMEOUT, SOLVER_ENV, find_solver

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEFECT = 2


class InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vessiot",
        description="Detect and classify real geometric singularities of polynomial ODE systems.",
    )
    p.add_argument("file", help="system file ('-' reads standard input)")
    p.add_argument("--prolong", type=int, metavar="K", help="prolong the system to jet order K")
    p.add_argument("--reduce", choices=("on", "off"), help="reduce prolonged equations and matrix rows (default on)")
    p.add_argument("--backend", choices=("internal", "external"), default="internal",
                   help="who decides satisfiability queries (default internal)")
    p.add_argument("--solver", metavar="PATH",
                   help=f"SMT solver executable (default: ${SOLVER_ENV})")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="solver timeout in seconds")
    p.add_argument("--format", choices=("json", "text"), default="text", help="output format (default text)")
    p.add_argument("--rows", choices=("top", "all"), default="top",
                   help="Vessiot rows from the top-order equations only, or from all equations")
    p.add_argument("--timings", action="store_true", help="include phase timings in the report")
    p.add_argument("-o", "--output", metavar="PATH", help="write the report to PATH instead of stdout")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


def run(args: argparse.Namespace) -> ReportDocument:
    """Execute the analysis described by parsed arguments."""
    try:
        sf = parse_system_file(_read(args.file))
    except ParseError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    except ValueError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    system = sf.system
    reduce = sf.reduce if args.reduce is None else args.reduce == "on"
    if reduce is None:
        reduce = True
    target = sf.prolong if args.prolong is None else args.prolong
    if target is not None:
        if target < system.order:
            raise InputError(f"cannot prolong an order {system.order} system to order {target}")
        if target > system.order:
            system = prolong(system, target, reduce=reduce)
    solver = None
    if args.solver or args.backend == "external":
        solver = find_solver(args.solver, args.timeout)
        if solver is None:
            where = args.solver or f"${SOLVER_ENV}"
            raise InputError(f"no usable solver at {where}")
    analysis = real_singularities(system, rows=args.rows, reduce=reduce, solver=solver, backend=args.backend)
    options = {
        "backend": args.backend,
        "prolong": target,
        "reduce": reduce,
        "rows": args.rows,
    }
    return ReportDocument.from_analysis(analysis, options, timings=args.timings)


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses status 2 for usage errors; that code is reserved here
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        doc = run(args)
    except InputError as exc:
        print(f"vessiot: error: {exc}", file=stderr)
        return EXIT_INPUT
    except InternalDefect as exc:
        print(f"vessiot: internal defect: {exc}", file=stderr)
        return EXIT_DEFECT
    text = serialize_report(doc, args.format)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"vessiot: error: cannot write {args.output}: {exc.strerror or exc}", file=stderr)
            return EXIT_INPUT
    else:
        stdout.write(text)
    for w in doc.warnings:
        print(f"vessiot: warning: {w}", file=stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
