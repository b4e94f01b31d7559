"""Detection and classification of real geometric singularities.

The Vessiot linear system of a differential system is solved by the guarded
elimination with the transversal coefficient ``a`` deferred.  Each elimination
case is intersected with the system, normalised to DNF, and pruned by real
satisfiability of each clause.  The shape of the parametric solution decides
the class:

* one free indeterminate and ``a`` free: regular points,
* one free indeterminate and ``a = 0``: regular singular points,
* two or more free indeterminates: irregular singular points,
* none: a zero-dimensional Vessiot space (reported as ``degenerate``).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .formula import And, Dnf, Guard, Or, to_dnf
from .jet import DifferentialSystem, VessiotMatrix, equation_atoms, vessiot_matrix
from .linalg import rank
from .pgauss import EliminationTask, InternalDefect, ParamSolution, parametric_gauss
from .poly import Scalar, Var
from .qelim import ExistentialQuery, Verdict, decide
from .smtlib import SolverConfig

A_NAME = "a"


class SingularityClass(Enum):
    REGULAR = "regular"
    REGULAR_SINGULAR = "regular-singular"
    IRREGULAR_SINGULAR = "irregular-singular"
    DEGENERATE = "degenerate"

    @property
    def label(self) -> str:
        return self.value.replace("-", " ")


def classify(h: ParamSolution, m: int | None = None) -> SingularityClass:
    """Class of the points whose Vessiot spaces are described by ``h``."""
    if m is not None and len(h.unknowns) != m + 1:
        raise ValueError(f"expected {m + 1} unknowns, got {len(h.unknowns)}")
    if h.n_free == 0:
        return SingularityClass.DEGENERATE
    if h.n_free >= 2:
        return SingularityClass.IRREGULAR_SINGULAR
    if h.is_free(A_NAME):
        return SingularityClass.REGULAR
    if not h.value(A_NAME).is_zero():
        raise InternalDefect("dependent a with a nonzero value")
    return SingularityClass.REGULAR_SINGULAR


@dataclass(frozen=True)
class CaseReport:
    """One class of points: where (guard), how (solution) and what (class)."""

    guard: Dnf
    solution: ParamSolution
    cls: SingularityClass
    vessiot_dim: int
    parameter_condition: Dnf | None = None
    verification: str = "verified"
    origin: int = 0
    elimination_guard: Guard = field(default_factory=Guard)

    @property
    def verified(self) -> bool:
        return self.verification == "verified"


@dataclass
class Analysis:
    system: DifferentialSystem
    matrix: VessiotMatrix
    reports: list[CaseReport]
    warnings: list[str]
    backend: str = "internal"
    timings: dict[str, float] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self) -> int:
        return len(self.reports)

    def by_class(self, cls: SingularityClass) -> list[CaseReport]:
        return [r for r in self.reports if r.cls is cls]


def real_singularities(
    sys: DifferentialSystem,
    *,
    rows: str = "top",
    reduce: bool = True,
    solver: SolverConfig | None = None,
    backend: str = "internal",
    check_termination: bool = False,
) -> Analysis:
    """Classify all real points of ``sys`` by their Vessiot spaces.

    ``backend="external"`` sends parameter-free satisfiability queries to
    ``solver`` directly; otherwise the solver only backs up the internal
    elimination when it blocks.
    """
    if backend not in ("internal", "external"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "external" and solver is None:
        raise ValueError("the external backend needs a solver")
    t0 = time.perf_counter()
    matrix = vessiot_matrix(sys, rows=rows, reduce=reduce)
    task = EliminationTask(matrix.entries, matrix.unknowns, (A_NAME,))
    elim = parametric_gauss(task, check_termination=check_termination)
    t1 = time.perf_counter()
    sigma = [*equation_atoms(sys), *sys.inequalities]
    params = sys.param_vars()
    reports: list[CaseReport] = []
    used_external = False
    for origin, case in enumerate(elim.cases):
        body = to_dnf(And(case.guard, *sigma))
        kept: list[Guard] = []
        conds: list[Dnf] = []
        unconditional = False
        reasons: list[str] = []
        for clause in body.clauses:
            q = ExistentialQuery.close(Dnf((clause,)), params)
            res = decide(q, solver=solver, prefer_external=backend == "external")
            used_external |= res.backend == "external"
            if res.verdict is Verdict.UNSAT:
                continue
            if res.verdict is Verdict.CONDITIONAL:
                kept.extend(to_dnf(And(clause, res.condition)).clauses)
                conds.append(res.condition)
                continue
            if res.verdict is Verdict.UNKNOWN:
                reasons.append(res.reason or "undecided")
            unconditional = True
            kept.append(clause)
        if not kept:
            continue
        guard = to_dnf(Or(*kept))
        if guard.is_false():
            continue
        cond = None
        if conds and not unconditional:
            cond = to_dnf(Or(*conds))
        sol = case.solution
        reports.append(
            CaseReport(
                guard=guard,
                solution=sol,
                cls=classify(sol, sys.m),
                vessiot_dim=sol.n_free,
                parameter_condition=cond,
                verification="verified" if not reasons else "unverified: " + "; ".join(dict.fromkeys(reasons)),
                origin=origin,
                elimination_guard=case.guard,
            )
        )
    t2 = time.perf_counter()
    warnings = _warnings(reports)
    return Analysis(
        sys,
        matrix,
        reports,
        warnings,
        backend="external" if used_external else "internal",
        timings={"elimination": t1 - t0, "pruning": t2 - t1},
    )


def _warnings(reports: list[CaseReport]) -> list[str]:
    out = []
    if any(r.cls is SingularityClass.DEGENERATE for r in reports):
        out.append("zero-dimensional Vessiot spaces found; the input is probably not well prepared")
    if reports and all(r.cls is SingularityClass.IRREGULAR_SINGULAR for r in reports):
        out.append("every case is irregular singular; the system may be underdetermined")
    for r in reports:
        if not r.verified:
            out.append(f"case {r.origin} kept without a satisfiability proof ({r.verification})")
    return out


def rank_classify_at_point(
    sys: DifferentialSystem,
    point: Mapping[Var, Scalar],
    rows: str = "top",
) -> SingularityClass:
    """Classify one rational jet point by matrix ranks.

    Raises ``ValueError`` when the point violates the system.
    """
    for p in sys.equations:
        if p.evaluate(point) != 0:
            raise ValueError(f"point is not on the system: {p} does not vanish")
    for a in sys.inequalities:
        if not a.evaluate(point):
            raise ValueError(f"point violates {a}")
    matrix = vessiot_matrix(sys, rows=rows, reduce=False)
    vals = [[Fraction(e.evaluate(point)) for e in row] for row in matrix.entries]
    m = sys.m
    r_sym = rank([row[:m] for row in vals]) if vals else 0
    r_aug = rank(vals) if vals else 0
    if r_aug == m + 1:
        return SingularityClass.DEGENERATE
    if r_aug < m:
        return SingularityClass.IRREGULAR_SINGULAR
    if r_sym == m:
        return SingularityClass.REGULAR
    return SingularityClass.REGULAR_SINGULAR
