"""Jet variables, contact vector fields, prolongation and the Vessiot matrix.

A point of the jet bundle of order ``l`` has coordinates ``t`` and the
derivatives ``u_a^(i)`` for ``0 <= i <= l``.  The contact distribution is
spanned by the transversal field::

    C_trans = d/dt + sum_{i=1..l} sum_a u_a^(i) d/du_a^(i-1)

and the vertical fields ``C_a = d/du_a^(l)``.  Vessiot vectors ``a*C_trans +
sum_a b_a*C_a`` tangent to a system of equations ``p_i = 0`` solve the
homogeneous linear system whose matrix is built by :func:`vessiot_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .formula import Atom, Rel, atom
from .poly import ZERO, Poly, Var, canonicalize, rational_content


@dataclass(frozen=True)
class DifferentialSystem:
    """Basic semialgebraic differential system.

    ``equations`` mean ``p = 0``; ``inequalities`` are atoms over jet
    variables and parameters.  The order is the jet order the system lives
    in, at least the highest derivative occurring.
    """

    funcs: tuple[str, ...]
    order: int
    equations: tuple[Poly, ...]
    inequalities: tuple[Atom, ...] = ()
    params: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.funcs:
            raise ValueError("at least one unknown function is required")
        if len(set(self.funcs) | set(self.params) | {"t"}) != len(self.funcs) + len(self.params) + 1:
            raise ValueError("function, parameter and time names must be distinct")
        if not self.equations:
            raise ValueError("the equation list must not be empty")
        allowed = set(self.all_vars())
        for p in (*self.equations, *(a.poly for a in self.inequalities)):
            extra = p.variables() - allowed
            if extra:
                names = ", ".join(sorted(str(v) for v in extra))
                raise ValueError(f"undeclared or out-of-order variables: {names}")

    @property
    def m(self) -> int:
        return len(self.funcs)

    @property
    def time(self) -> Var:
        return Var.time()

    def dep(self, index: int, order: int = 0) -> Var:
        return Var.dep(index, order, self.funcs[index])

    def param_vars(self) -> list[Var]:
        return [Var.param(i, n) for i, n in enumerate(self.params)]

    def jet_vars(self, order: int | None = None) -> list[Var]:
        """``t`` followed by all derivatives up to ``order`` (default: the system order)."""
        q = self.order if order is None else order
        return [self.time] + [self.dep(a, k) for k in range(q + 1) for a in range(self.m)]

    def all_vars(self) -> list[Var]:
        return self.jet_vars() + self.param_vars()

    def top_vars(self) -> list[Var]:
        return [self.dep(a, self.order) for a in range(self.m)]

    def vessiot_unknowns(self) -> tuple[str, ...]:
        """Names of the Vessiot coefficients in column order ``(b_1..b_m, a)``."""
        if self.m == 1:
            return ("b", "a")
        return tuple(f"b_{f}" for f in self.funcs) + ("a",)


def contact_trans(p: Poly, order: int) -> Poly:
    """Apply the transversal contact field of jet order ``order`` to ``p``."""
    if p.jet_order() > order:
        raise ValueError(f"polynomial of order {p.jet_order()} exceeds jet order {order}")
    out = p.diff(Var.time())
    for v in sorted(p.variables()):
        if v.is_dep and v.order < order:
            out = out + Poly.var(v.derivative()) * p.diff(v)
    return out


def contact_vertical(p: Poly, x: Var) -> Poly:
    """Apply the vertical contact field ``d/dx`` for a top-order derivative ``x``."""
    return p.diff(x)


def formal_derivative(p: Poly) -> Poly:
    """Total derivative with respect to ``t``."""
    return contact_trans(p, max(p.jet_order(), -1) + 1)


def _top_dep(p: Poly) -> Var | None:
    deps = [v for v in p.variables() if v.is_dep]
    return max(deps) if deps else None


def reduction_rules(eqs: Iterable[Poly]) -> dict[Var, Poly]:
    """Substitutions ``x -> q`` from equations linear in their highest derivative.

    Only equations whose highest derivative ``x`` occurs linearly with a
    rational coefficient qualify.  The rules are kept inter-reduced so that a
    single simultaneous substitution reduces any polynomial completely.
    """
    rules: dict[Var, Poly] = {}
    for p in eqs:
        r = p.subs(rules)
        x = _top_dep(r)
        if x is None:
            continue
        cs = r.coeffs_in(x)
        if max(cs) != 1 or not cs[1].is_constant():
            continue
        q = -cs.get(0, ZERO) / cs[1].constant_value()
        for y in rules:
            rules[y] = rules[y].subs({x: q})
        rules[x] = q
    return rules


def prolong(sys: DifferentialSystem, target: int, reduce: bool = False) -> DifferentialSystem:
    """Prolong ``sys`` to jet order ``target``.

    Every equation is differentiated once per order step.  With ``reduce``
    each new equation is first reduced by the substitution rules of the
    equations already present.  Duplicates are dropped; inequalities are
    carried over unchanged.
    """
    if target < sys.order:
        raise ValueError(f"cannot prolong order {sys.order} system to order {target}")
    eqs = list(sys.equations)
    frontier = list(sys.equations)
    for _ in range(target - sys.order):
        rules = reduction_rules(eqs) if reduce else {}
        new = []
        for p in frontier:
            d = formal_derivative(p)
            if reduce:
                d = d.subs(rules)
            if d.is_zero():
                continue
            d = canonicalize(d)[1]
            if d not in eqs and d not in new:
                new.append(d)
            if reduce:
                rules = reduction_rules(eqs + new)
        eqs.extend(new)
        frontier = new
    if target == sys.order:
        return sys
    return replace(sys, order=target, equations=tuple(eqs))


@dataclass(frozen=True)
class VessiotMatrix:
    """Coefficient matrix of the Vessiot linear system.

    Columns ``0..m-1`` hold the coefficients of ``b_1..b_m``, the last column
    the coefficient of ``a``.  ``sources[i]`` is the index of the equation
    that produced row ``i``.
    """

    entries: tuple[tuple[Poly, ...], ...]
    unknowns: tuple[str, ...]
    sources: tuple[int, ...] = field(default=())

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.unknowns)

    def rows(self) -> list[list[Poly]]:
        return [list(r) for r in self.entries]

    def __str__(self) -> str:
        head = " | ".join(self.unknowns)
        body = "\n".join(" | ".join(str(e) for e in row) for row in self.entries)
        return f"{head}\n{body}"


def _normalize_row(row: Sequence[Poly]) -> tuple[Poly, ...]:
    nonzero = [e for e in row if not e.is_zero()]
    if not nonzero:
        return tuple(row)
    c = Fraction(0)
    for e in nonzero:
        rc = rational_content(e)
        c = rc if c == 0 else Fraction(gcd(c.numerator, rc.numerator), lcm(c.denominator, rc.denominator))
    if canonicalize(nonzero[0])[0] < 0:
        c = -c
    return tuple(e * (1 / c) for e in row)


def vessiot_matrix(sys: DifferentialSystem, rows: str = "top", reduce: bool = False) -> VessiotMatrix:
    """Matrix of the Vessiot linear system of ``sys``.

    ``rows="top"`` keeps only equations of the system order; lower-order
    equations contribute zero rows on prolonged systems.  ``rows="all"``
    keeps every equation.  With ``reduce`` the entries are reduced by the
    system's substitution rules (valid on the solution set).  Each row is
    divided by its rational content.
    """
    if rows not in ("top", "all"):
        raise ValueError(f"rows must be 'top' or 'all', not {rows!r}")
    rules = reduction_rules(sys.equations) if reduce else {}
    tops = sys.top_vars()
    out = []
    sources = []
    for i, p in enumerate(sys.equations):
        if rows == "top" and p.jet_order() < sys.order:
            continue
        row = [contact_vertical(p, x) for x in tops] + [contact_trans(p, sys.order)]
        if rules:
            row = [e.subs(rules) for e in row]
        out.append(_normalize_row(row))
        sources.append(i)
    return VessiotMatrix(tuple(out), sys.vessiot_unknowns(), tuple(sources))


def inequality_atoms(sys: DifferentialSystem) -> list[Atom]:
    return list(sys.inequalities)


def equation_atoms(sys: DifferentialSystem) -> list[Atom]:
    return [a for p in sys.equations if isinstance(a := atom(p, Rel.EQ), Atom)]
