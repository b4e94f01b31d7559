"""Existential quantifier elimination by virtual substitution.

For a conjunction in which a variable ``x`` occurs at most quadratically,
``exists x`` is replaced by a finite disjunction over symbolic test points:
the roots of the atoms (guarded by conditions on their coefficients),
``-oo`` and infinitesimal shifts ``e + eps`` of roots of strict atoms.  When
an equation in ``x`` is present only its roots are tried, together with the
case that all its coefficients vanish.  Substituting ``(p + q*sqrt(d))/r``
into a polynomial of degree at most two uses the classical sign rules for
``A + B*sqrt(d)``; no numeric approximation is involved.

:func:`decide` eliminates a block of variables clause by clause.  When the
degree bound blocks every variable, exponents that share a common factor
``g`` are shrunk (``x^g -> y``, with ``y >= 0`` for even ``g``); a clause left
in a single variable is decided exactly by :mod:`vessiot.univariate`.  Only
the remaining clauses go to an external SMT solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Iterable, Sequence

from . import univariate

from .formula import (
    Atom,
    And,
    Dnf,
    Formula,
    Guard,
    Not,
    Or,
    Rel,
    TRUE_GUARD,
    atom,
    simplify,
    to_dnf,
)
from .poly import ZERO, Poly, Var
from .smtlib import SolverConfig, export_smtlib, run_solver

MAX_DEGREE = 2
MAX_CLAUSES = 4000


class NotEliminable(Exception):
    """The variable occurs with degree above the supported bound."""


@dataclass(frozen=True)
class _Point:
    """Test point ``(p + q*sqrt(d)) / r``, possibly shifted by ``eps``.

    ``minf`` marks the point ``-oo``.  ``guard`` lists the conditions under
    which the point is a root of ``source``.
    """

    p: Poly = ZERO
    q: Poly = ZERO
    d: Poly = ZERO
    r: Poly = Poly.const(1)
    eps: bool = False
    minf: bool = False
    guard: tuple = ()
    source: Atom | None = None


def _coeffs(f: Poly, x: Var) -> list[Poly]:
    cs = f.coeffs_in(x)
    n = max(cs)
    return [cs.get(i, ZERO) for i in range(n + 1)]


def _roots(f: Atom, x: Var) -> list[_Point]:
    c = _coeffs(f.poly, x)
    if len(c) == 2:
        return [_Point(p=-c[0], r=c[1], guard=(atom(c[1], Rel.NE),), source=f)]
    c0, c1, c2 = c
    out = [
        _Point(p=-c0, r=c1, guard=(atom(c2, Rel.EQ), atom(c1, Rel.NE)), source=f),
    ]
    disc = c1 * c1 - 4 * c2 * c0
    for s in (1, -1):
        out.append(
            _Point(p=-c1, q=Poly.const(s), d=disc, r=2 * c2,
                   guard=(atom(c2, Rel.NE), atom(disc, Rel.GE)), source=f)
        )
    return out


def _sqrt_sign(a: Poly, b: Poly, d: Poly, rel: Rel) -> Formula:
    """``a + b*sqrt(d) rel 0`` as a formula free of the square root (``d >= 0``)."""
    if b.is_zero():
        return atom(a, rel)
    disc = a * a - b * b * d
    if rel is Rel.EQ:
        return And(atom(a * b, Rel.LE), atom(disc, Rel.EQ))
    if rel is Rel.NE:
        return Or(atom(a * b, Rel.GT), atom(disc, Rel.NE))
    if rel is Rel.LT:
        return Or(And(atom(a, Rel.LT), atom(disc, Rel.GT)),
                  And(atom(b, Rel.LE), Or(atom(a, Rel.LT), atom(disc, Rel.LT))))
    if rel is Rel.LE:
        return Or(And(atom(a, Rel.LE), atom(disc, Rel.GE)),
                  And(atom(b, Rel.LE), atom(disc, Rel.LE)))
    if rel is Rel.GT:
        return _sqrt_sign(-a, -b, d, Rel.LT)
    return _sqrt_sign(-a, -b, d, Rel.LE)


def _at_root(f: Poly, x: Var, pt: _Point, rel: Rel) -> Formula:
    """``f(e) rel 0`` for the (unshifted) root ``e`` of ``pt``."""
    c = _coeffs(f, x)
    while len(c) < 3:
        c.append(ZERO)
    c0, c1, c2 = c[:3]
    p, q, d, r = pt.p, pt.q, pt.d, pt.r
    a = c2 * (p * p + q * q * d) + c1 * r * p + c0 * r * r
    b = 2 * c2 * p * q + c1 * r * q
    return _sqrt_sign(a, b, d, rel)


def _identically(f: Poly, x: Var, zero: bool) -> Formula:
    cs = [c for c in _coeffs(f, x)]
    if zero:
        return And(*(atom(c, Rel.EQ) for c in cs))
    return Or(*(atom(c, Rel.NE) for c in cs))


def _at_eps(f: Poly, x: Var, pt: _Point, rel: Rel) -> Formula:
    """``f(e + eps) rel 0`` for infinitesimal positive ``eps``."""
    if rel is Rel.EQ:
        return _identically(f, x, True)
    if rel is Rel.NE:
        return _identically(f, x, False)
    if rel in (Rel.LE, Rel.GE):
        strict = Rel.LT if rel is Rel.LE else Rel.GT
        return Or(_at_eps(f, x, pt, strict), _identically(f, x, True))
    if f.degree_in(x) <= 0:
        return atom(f, rel)
    return Or(_at_root(f, x, pt, rel), And(_at_root(f, x, pt, Rel.EQ), _at_eps(f.diff(x), x, pt, rel)))


def _at_minf(f: Poly, x: Var, rel: Rel) -> Formula:
    """``f(-oo) rel 0``, i.e. the sign of ``f`` for all sufficiently small ``x``."""
    if rel is Rel.EQ:
        return _identically(f, x, True)
    if rel is Rel.NE:
        return _identically(f, x, False)
    if rel in (Rel.LE, Rel.GE):
        strict = Rel.LT if rel is Rel.LE else Rel.GT
        return Or(_at_minf(f, x, strict), _identically(f, x, True))
    n = f.degree_in(x)
    if n <= 0:
        return atom(f, rel)
    cs = f.coeffs_in(x)
    lead = cs[n]
    rest = f - lead * Poly.var(x, n)
    signed = lead if n % 2 == 0 else -lead
    return Or(atom(signed, rel), And(atom(lead, Rel.EQ), _at_minf(rest, x, rel)))


def _substitute(a: Atom, x: Var, pt: _Point) -> Formula:
    if x not in a.poly.variables():
        return a
    if pt.minf:
        return _at_minf(a.poly, x, a.rel)
    if pt.eps:
        return _at_eps(a.poly, x, pt, a.rel)
    if pt.source is not None and pt.source.poly == a.poly:
        return 0 in a.signs
    return _at_root(a.poly, x, pt, a.rel)


def eliminate_var(x: Var, clause: Guard) -> Dnf:
    """Equivalent quantifier-free DNF of ``exists x. clause``.

    Raises :class:`NotEliminable` when an atom other than an inequation has
    degree above two in ``x``.
    """
    return to_dnf(_eliminate(x, clause))


def _eliminate(x: Var, clause: Guard) -> Formula:
    if clause.false:
        return False
    rest = [a for a in clause.atoms if x not in a.variables()]
    with_x = [a for a in clause.atoms if x in a.variables()]
    if not with_x:
        return clause
    if all(a.rel is Rel.NE for a in with_x):
        # finitely many roots: satisfiable iff no atom vanishes identically in x
        return And(*rest, *(_identically(a.poly, x, False) for a in with_x))
    if any(a.poly.degree_in(x) > MAX_DEGREE for a in with_x):
        raise NotEliminable(f"{x} occurs with degree above {MAX_DEGREE}")
    eqs = [a for a in with_x if a.rel is Rel.EQ]
    if eqs:
        f = min(eqs, key=lambda a: (a.poly.degree_in(x), a.sort_key()))
        others = [a for a in with_x if a is not f]
        disj: list[Formula] = []
        sub = Guard.of((*others, *(atom(c, Rel.EQ) for c in _coeffs(f.poly, x))))
        if not sub.false:
            disj.append(_eliminate(x, sub))
        for pt in _roots(f, x):
            disj.append(And(*pt.guard, *(_substitute(a, x, pt) for a in others)))
        return And(*rest, Or(*disj))
    points: list[_Point] = [_Point(minf=True)]
    for a in with_x:
        for pt in _roots(a, x):
            if a.rel.is_strict:
                pt = _Point(pt.p, pt.q, pt.d, pt.r, True, False, pt.guard, None)
            points.append(pt)
    disj = [And(*pt.guard, *(_substitute(a, x, pt) for a in with_x)) for pt in points]
    return And(*rest, Or(*disj))


# ---------------------------------------------------------------------------
# decision


class Verdict(Enum):
    UNSAT = "unsat"
    SAT = "sat"
    CONDITIONAL = "conditional"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ExistentialQuery:
    """``exists quantified. body``; ``free`` are the remaining parameters."""

    quantified: tuple[Var, ...]
    body: Dnf
    free: tuple[Var, ...] = ()

    def __post_init__(self) -> None:
        if set(self.quantified) & set(self.free):
            raise ValueError("quantified and free variables must be disjoint")

    @classmethod
    def close(cls, body: Dnf, free: Iterable[Var] = ()) -> ExistentialQuery:
        """Quantify every variable of ``body`` except ``free``."""
        free = tuple(sorted(set(free)))
        qs = tuple(sorted(body.variables() - set(free)))
        return cls(qs, body, free)


@dataclass(frozen=True)
class QueryResult:
    verdict: Verdict
    condition: Dnf | None = None
    reason: str | None = None
    backend: str = "internal"

    @property
    def satisfiable(self) -> bool | None:
        if self.verdict is Verdict.SAT:
            return True
        if self.verdict is Verdict.UNSAT:
            return False
        return None


@dataclass
class _Blocked:
    clause: Guard
    remaining: tuple[Var, ...]


def _pick(clause: Guard, remaining: Sequence[Var]) -> Var | None:
    best = None
    for v in remaining:
        deg = max((a.poly.degree_in(v) for a in clause.atoms if v in a.variables()), default=0)
        if deg == 0:
            continue
        only_ne = all(a.rel is Rel.NE for a in clause.atoms if v in a.variables())
        eff = 0 if only_ne else deg
        if eff > MAX_DEGREE:
            continue
        key = (eff, v)
        if best is None or key < best[0]:
            best = (key, v)
    return None if best is None else best[1]


def _shrink(clause: Guard, remaining: Sequence[Var]) -> Guard | None:
    """Substitute ``x^g -> x`` when ``x`` only occurs in powers of ``x^g``.

    For even ``g`` the new variable is constrained to be nonnegative.
    """
    for x in remaining:
        g = 0
        for a in clause.atoms:
            for m in a.poly.terms:
                for v, e in m:
                    if v == x:
                        g = gcd(g, e)
        if g <= 1:
            continue
        items: list[Atom | bool] = []
        for a in clause.atoms:
            terms = {}
            for m, c in a.poly.terms.items():
                terms[tuple((v, e // g if v == x else e) for v, e in m)] = c
            items.append(atom(Poly(terms), a.rel))
        if g % 2 == 0:
            items.append(atom(Poly.var(x), Rel.GE))
        return Guard.of(items)
    return None


def _univariate_sat(clause: Guard) -> bool:
    (x,) = clause.variables()
    return univariate.satisfiable((univariate.to_dense(a.poly, x), a.rel.signs) for a in clause.atoms)


def eliminate_block(clause: Guard, quantified: Sequence[Var]) -> tuple[list[Guard], list[_Blocked]]:
    """Eliminate ``quantified`` from one clause.

    Returns the residual clauses (free of the quantified variables) and the
    partially eliminated clauses that blocked on the degree bound.
    """
    qset = set(quantified)
    done: list[Guard] = []
    blocked: list[_Blocked] = []
    work = [clause]
    seen: set[Guard] = set()
    while work:
        if len(seen) > MAX_CLAUSES:
            raise NotEliminable("clause budget exhausted")
        g = work.pop()
        if g in seen:
            continue
        seen.add(g)
        remaining = tuple(sorted(g.variables() & qset))
        if not remaining:
            done.append(g)
            continue
        x = _pick(g, remaining)
        if x is None:
            shrunk = _shrink(g, remaining)
            if shrunk is not None:
                work.append(shrunk)
                continue
            if len(g.variables()) == 1:
                if _univariate_sat(g):
                    return [TRUE_GUARD], []
                continue
            blocked.append(_Blocked(g, remaining))
            continue
        for c in reversed(eliminate_var(x, g).clauses):
            if c.is_true():
                return [c], []
            work.append(c)
    return done, blocked


def decide(
    q: ExistentialQuery,
    *,
    solver: SolverConfig | None = None,
    prefer_external: bool = False,
) -> QueryResult:
    """Decide ``q`` or reduce it to a condition on the free parameters.

    ``prefer_external`` sends parameter-free queries directly to ``solver``.
    """
    free = set(q.free)
    if q.body.is_false():
        return QueryResult(Verdict.UNSAT)
    if prefer_external and solver is not None and not (q.body.variables() & free):
        return _external(q.quantified, q.body, solver)
    residual: list[Guard] = []
    pending: list[_Blocked] = []
    for clause in q.body.clauses:
        try:
            done, blocked = eliminate_block(clause, q.quantified)
        except NotEliminable:
            done, blocked = [], [_Blocked(clause, tuple(sorted(clause.variables() & set(q.quantified))))]
        residual.extend(done)
        pending.extend(blocked)
        if any(c.is_true() for c in done):
            return QueryResult(Verdict.SAT)
    reasons = []
    for b in pending:
        if b.clause.variables() & free:
            reasons.append(f"degree bound blocks elimination of {', '.join(map(str, b.remaining))}")
            continue
        if solver is None:
            reasons.append(f"degree bound blocks elimination of {', '.join(map(str, b.remaining))}; no external solver configured")
            continue
        res = _external(b.remaining, Dnf((b.clause,)), solver)
        if res.verdict is Verdict.SAT:
            return QueryResult(Verdict.SAT, backend="external")
        if res.verdict is Verdict.UNKNOWN:
            reasons.append(res.reason or "external solver returned unknown")
    cond = simplify_residual(residual)
    if cond.is_true():
        return QueryResult(Verdict.SAT)
    if reasons:
        return QueryResult(Verdict.UNKNOWN, cond, "; ".join(reasons))
    if cond.is_false():
        return QueryResult(Verdict.UNSAT)
    if not free:
        # residual clauses are variable free, hence already evaluated
        return QueryResult(Verdict.SAT)
    return QueryResult(Verdict.CONDITIONAL, cond)


def simplify_residual(clauses: list[Guard]) -> Dnf:
    return to_dnf(Or(*clauses)) if clauses else Dnf.false()


def _external(quantified: Sequence[Var], body: Dnf, solver: SolverConfig) -> QueryResult:
    script = export_smtlib(quantified, body)
    out = run_solver(script, solver)
    if out == "sat":
        return QueryResult(Verdict.SAT, backend="external")
    if out == "unsat":
        return QueryResult(Verdict.UNSAT, backend="external")
    return QueryResult(Verdict.UNKNOWN, reason=f"{solver.name} returned unknown", backend="external")


def is_satisfiable(body: Dnf, solver: SolverConfig | None = None) -> bool | None:
    """Convenience: decide a parameter-free body; ``None`` when unknown."""
    return decide(ExistentialQuery.close(body), solver=solver).satisfiable


def implies(lhs: Dnf, rhs: Dnf, free: Iterable[Var] = (), solver: SolverConfig | None = None) -> bool | None:
    """Whether ``lhs -> rhs`` holds for all real values (``None`` when undecided)."""
    body = to_dnf(And(lhs, Not(rhs)))
    res = decide(ExistentialQuery.close(body, free), solver=solver)
    if res.verdict is Verdict.UNSAT:
        return True
    if res.verdict is Verdict.SAT:
        return False
    return None
