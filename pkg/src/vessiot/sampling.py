"""Rational sample points on semialgebraic sets given by guard clauses.

Used by the test oracles.  Equations are solved one variable at a time:
variables occurring linearly are solved for after randomising the others,
univariate equations are solved by their rational roots.  Points that
violate any atom are discarded.
"""
from __future__ import annotations

import random
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

from .formula import Guard, Rel
from .poly import Poly, Var, _rational_roots

POOL = sorted(
    {Fraction(n, d) for n in range(-3, 4) for d in (1, 2, 3)}
    | {Fraction(s * n, d) for s in (1, -1) for n, d in ((3, 5), (4, 5), (5, 13), (12, 13), (8, 17), (15, 17))}
)


def random_value(rng: random.Random) -> Fraction:
    return rng.choice(POOL)


def _sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def _univariate_roots(q: Poly, x: Var) -> list[Fraction]:
    cs = q.coeffs_in(x)
    if max(cs) == 2:
        a, b, c = (cs.get(i, Poly()).constant_value() for i in (2, 1, 0))
        s = _sqrt(b * b - 4 * a * c)
        if s is None:
            return []
        return sorted({(-b - s) / (2 * a), (-b + s) / (2 * a)})
    return _rational_roots(q, x)


def try_point(
    clause: Guard,
    variables: Sequence[Var],
    rng: random.Random,
    fixed: dict[Var, Fraction] | None = None,
) -> dict[Var, Fraction] | None:
    """One attempt at a rational point of ``clause``; ``None`` on failure."""
    point: dict[Var, Fraction] = dict(fixed or {})
    eqs = [a.poly for a in clause.atoms if a.rel is Rel.EQ]
    for _ in range(4 * len(variables) + 8):
        pending = []
        for p in eqs:
            q = p.subs(point)
            if q.is_zero():
                continue
            if q.is_constant():
                return None
            pending.append(q)
        if not pending:
            break
        linear = [(q, v) for q in pending for v in sorted(q.variables()) if q.degree_in(v) == 1]
        if linear:
            q, v = rng.choice(linear)
            for w in sorted(q.variables()):
                if w != v:
                    point[w] = random_value(rng)
            q = q.subs({w: point[w] for w in q.variables() if w != v})
            cs = q.coeffs_in(v)
            c1 = cs.get(1, Poly()).constant_value()
            if c1 == 0:
                return None
            point[v] = -cs.get(0, Poly()).constant_value() / c1
            continue
        q = min(pending, key=lambda p: (len(p.variables()), p.degree()))
        vs = sorted(q.variables())
        if len(vs) == 1:
            roots = _univariate_roots(q, vs[0])
            if not roots:
                return None
            point[vs[0]] = rng.choice(roots)
            continue
        keep = min(vs, key=lambda v: (q.degree_in(v), rng.random()))
        for w in vs:
            if w != keep:
                point[w] = random_value(rng)
    for v in variables:
        if v not in point:
            point[v] = random_value(rng)
    if all(a.evaluate(point) for a in clause.atoms):
        return point
    return None


def sample_clause(
    clause: Guard,
    variables: Iterable[Var],
    count: int,
    rng: random.Random | int = 0,
    tries: int = 4000,
    fixed: dict[Var, Fraction] | None = None,
) -> list[dict[Var, Fraction]]:
    """Up to ``count`` distinct rational points satisfying ``clause``."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    variables = sorted(set(variables) | clause.variables())
    found: list[dict[Var, Fraction]] = []
    seen = set()
    for _ in range(tries):
        pt = try_point(clause, variables, rng, fixed)
        if pt is None:
            continue
        key = tuple(sorted(pt.items()))
        if key in seen:
            continue
        seen.add(key)
        found.append(pt)
        if len(found) >= count:
            break
    return found
