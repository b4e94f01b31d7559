"""SMT-LIB 2 export of existential queries and an external solver bridge.

Scripts use the ``QF_NRA`` logic.  Jet variables are written as quoted
symbols (``|u'|``) when their name is not a plain SMT-LIB symbol.
"""
from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .formula import Atom, Dnf, Guard, Rel
from .poly import Poly, Var

SOLVER_ENV = "VESSIOT_SOLVER"
DEFAULT_TIMEOUT = 10.0

_PLAIN = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


class ExportError(ValueError):
    """The query cannot be written as a pure satisfiability script."""


def symbol(v: Var) -> str:
    s = str(v)
    return s if _PLAIN.match(s) else f"|{s}|"


def _rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"(/ {c.numerator} {c.denominator})"


def _term(mono, c: Fraction) -> str:
    factors = [symbol(v) for v, e in mono for _ in range(e)]
    if c != 1 or not factors:
        factors.insert(0, _rational(c))
    return factors[0] if len(factors) == 1 else f"(* {' '.join(factors)})"


def term(p: Poly) -> str:
    """SMT-LIB term for a polynomial (sums of products, no exponentiation)."""
    if p.is_zero():
        return "0"
    pos = [_term(m, c) for m, c in p.sorted_terms() if c > 0]
    neg = [_term(m, -c) for m, c in p.sorted_terms() if c < 0]
    if not neg:
        return pos[0] if len(pos) == 1 else f"(+ {' '.join(pos)})"
    if not pos:
        return f"(- {neg[0]})" if len(neg) == 1 else f"(- 0 {' '.join(neg)})"
    head = pos[0] if len(pos) == 1 else f"(+ {' '.join(pos)})"
    return f"(- {head} {' '.join(neg)})"


_OPS = {Rel.EQ: "=", Rel.LT: "<", Rel.LE: "<=", Rel.GT: ">", Rel.GE: ">="}


def assertion_body(a: Atom) -> str:
    if a.rel is Rel.NE:
        return f"(not (= {term(a.poly)} 0))"
    return f"({_OPS[a.rel]} {term(a.poly)} 0)"


def _conj(g: Guard) -> str:
    if not g.atoms:
        return "true"
    if len(g.atoms) == 1:
        return assertion_body(g.atoms[0])
    return "(and " + " ".join(assertion_body(a) for a in g.atoms) + ")"


def export_smtlib(quantified: Iterable[Var], body: Dnf, free: Iterable[Var] = ()) -> str:
    """Byte-deterministic ``QF_NRA`` script deciding ``exists quantified. body``."""
    if tuple(free):
        raise ExportError("queries with free parameters cannot be exported")
    qs = sorted(set(quantified) | body.variables())
    lines = ["(set-logic QF_NRA)"]
    lines += [f"(declare-const {symbol(v)} Real)" for v in qs]
    if not body.clauses:
        lines.append("(assert false)")
    elif len(body.clauses) == 1:
        lines += [f"(assert {assertion_body(a)})" for a in body.clauses[0].atoms]
    else:
        lines.append("(assert (or " + " ".join(_conj(c) for c in body.clauses) + "))")
    lines.append("(check-sat)")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolverConfig:
    """External SMT solver invoked as ``path script.smt2``."""

    path: str
    timeout: float = DEFAULT_TIMEOUT

    @property
    def name(self) -> str:
        return os.path.basename(self.path)


def find_solver(path: str | None = None, timeout: float = DEFAULT_TIMEOUT) -> SolverConfig | None:
    """Resolve a solver from an explicit path or the ``VESSIOT_SOLVER`` variable."""
    cand = path or os.environ.get(SOLVER_ENV)
    if not cand:
        return None
    resolved = shutil.which(cand) or (cand if os.path.isfile(cand) else None)
    if resolved is None:
        return None
    return SolverConfig(resolved, timeout)


def run_solver(script: str, config: SolverConfig) -> str:
    """Run the solver on ``script``; returns ``sat``, ``unsat`` or ``unknown``."""
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as fh:
        fh.write(script)
        fname = fh.name
    try:
        proc = subprocess.run(
            [config.path, fname],
            capture_output=True,
            text=True,
            timeout=config.timeout,
        )
    except (subprocess.TimeoutExpired, OSError):
        return "unknown"
    finally:
        os.unlink(fname)
    for line in proc.stdout.splitlines():
        line = line.strip()
        if line in ("sat", "unsat", "unknown"):
            return line
    return "unknown"
