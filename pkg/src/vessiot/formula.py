"""Quantifier-free real formulas over polynomial sign conditions.

An :class:`Atom` compares a canonical primitive polynomial with zero.  A
:class:`Guard` is a conjunction of atoms, stored as a map from polynomial to
the set of admissible signs, which makes duplicate removal and detection of
complementary pairs automatic.  A :class:`Dnf` is a disjunction of guards.

Besides the normal-form machinery the module provides the deduction procedure
used by the parametric elimination: :func:`deduce` answers whether a guard
entails an atom, :func:`is_false` whether a guard is refutable.  Both are
sound but incomplete.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

from .poly import (
    ZERO,
    Poly,
    Scalar,
    Var,
    canonicalize,
    definite_sign,
    factor_basic,
    poly_sort_key,
)

SignSet = frozenset
ALL_SIGNS: SignSet = frozenset((-1, 0, 1))


def _sign(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


class Rel(Enum):
    """Relation of a polynomial against zero."""

    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    @property
    def signs(self) -> SignSet:
        return _REL_SIGNS[self]

    @classmethod
    def from_signs(cls, signs: Iterable[int]) -> Rel | None:
        """Relation admitting exactly ``signs``; ``None`` for the empty and full sets."""
        return _SIGNS_REL.get(frozenset(signs))

    def flip(self) -> Rel:
        """Relation satisfied by ``-p`` whenever ``p`` satisfies ``self``."""
        return Rel.from_signs(-s for s in self.signs)

    def negate(self) -> Rel:
        return Rel.from_signs(ALL_SIGNS - self.signs)

    @property
    def is_strict(self) -> bool:
        return 0 not in self.signs


_REL_SIGNS = {
    Rel.EQ: frozenset((0,)),
    Rel.NE: frozenset((-1, 1)),
    Rel.LT: frozenset((-1,)),
    Rel.LE: frozenset((-1, 0)),
    Rel.GT: frozenset((1,)),
    Rel.GE: frozenset((0, 1)),
}
_SIGNS_REL = {s: r for r, s in _REL_SIGNS.items()}
_REL_RANK = {Rel.EQ: 0, Rel.NE: 1, Rel.LT: 2, Rel.LE: 3, Rel.GT: 4, Rel.GE: 5}


@dataclass(frozen=True)
class Atom:
    """``poly rel 0`` with ``poly`` canonical and primitive."""

    poly: Poly
    rel: Rel

    @property
    def signs(self) -> SignSet:
        return self.rel.signs

    def negate(self) -> Atom:
        return Atom(self.poly, self.rel.negate())

    def evaluate(self, point: Mapping[Var, Scalar]) -> bool:
        return _sign(self.poly.evaluate(point)) in self.rel.signs

    def variables(self) -> frozenset[Var]:
        return self.poly.variables()

    def sort_key(self) -> tuple:
        return (_REL_RANK[self.rel], poly_sort_key(self.poly))

    def __str__(self) -> str:
        return f"{self.poly} {self.rel.value} 0"


def atom(p: Poly | Scalar, rel: Rel) -> Atom | bool:
    """Build the atom ``p rel 0``; constant comparisons evaluate to a bool."""
    p = Poly.coerce(p)
    if p.is_constant():
        return _sign(p.constant_value()) in rel.signs
    c, prim = canonicalize(p)
    if c < 0:
        rel = rel.flip()
    return Atom(prim, rel)


def atom_from_signs(p: Poly, signs: Iterable[int]) -> Atom | bool:
    """Atom admitting exactly the signs ``signs`` for ``p``."""
    signs = frozenset(signs)
    if not signs:
        return False
    if signs == ALL_SIGNS:
        return True
    return atom(p, Rel.from_signs(signs))


# ---------------------------------------------------------------------------
# guards


@dataclass(frozen=True)
class Guard:
    """Conjunction of atoms.

    Use :meth:`Guard.of` to build guards; it merges atoms over the same
    polynomial and flags contradictions.
    """

    atoms: tuple[Atom, ...] = ()
    false: bool = False

    @classmethod
    def of(cls, items: Iterable[Atom | bool]) -> Guard:
        signs: dict[Poly, SignSet] = {}
        for a in items:
            if a is True:
                continue
            if a is False:
                return FALSE_GUARD
            s = signs.get(a.poly, ALL_SIGNS) & a.signs
            if not s:
                return FALSE_GUARD
            signs[a.poly] = s
        atoms = [Atom(p, Rel.from_signs(s)) for p, s in signs.items() if s != ALL_SIGNS]
        atoms.sort(key=Atom.sort_key)
        return cls(tuple(atoms))

    def conj(self, *items: Atom | bool | Guard) -> Guard:
        if self.false:
            return self
        extra: list[Atom | bool] = []
        for it in items:
            if isinstance(it, Guard):
                if it.false:
                    return FALSE_GUARD
                extra.extend(it.atoms)
            else:
                extra.append(it)
        return Guard.of((*self.atoms, *extra))

    def signs_of(self, p: Poly) -> SignSet:
        for a in self.atoms:
            if a.poly == p:
                return a.signs
        return ALL_SIGNS

    def equations(self) -> list[Poly]:
        return [a.poly for a in self.atoms if a.rel is Rel.EQ]

    def is_true(self) -> bool:
        return not self.false and not self.atoms

    def evaluate(self, point: Mapping[Var, Scalar]) -> bool:
        return not self.false and all(a.evaluate(point) for a in self.atoms)

    def variables(self) -> frozenset[Var]:
        out: set[Var] = set()
        for a in self.atoms:
            out |= a.variables()
        return frozenset(out)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        if self.false:
            return "false"
        if not self.atoms:
            return "true"
        return " and ".join(str(a) for a in self.atoms)


TRUE_GUARD = Guard()
FALSE_GUARD = Guard((), True)


@dataclass(frozen=True)
class Dnf:
    """Disjunction of guards; no clauses means false."""

    clauses: tuple[Guard, ...] = ()

    @classmethod
    def true(cls) -> Dnf:
        return cls((TRUE_GUARD,))

    @classmethod
    def false(cls) -> Dnf:
        return cls(())

    def is_false(self) -> bool:
        return not self.clauses

    def is_true(self) -> bool:
        return any(c.is_true() for c in self.clauses)

    def evaluate(self, point: Mapping[Var, Scalar]) -> bool:
        return any(c.evaluate(point) for c in self.clauses)

    def variables(self) -> frozenset[Var]:
        out: set[Var] = set()
        for c in self.clauses:
            out |= c.variables()
        return frozenset(out)

    def __iter__(self) -> Iterator[Guard]:
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __str__(self) -> str:
        if not self.clauses:
            return "false"
        if len(self.clauses) == 1:
            return str(self.clauses[0])
        return " or ".join(f"({c})" for c in self.clauses)


# ---------------------------------------------------------------------------
# boolean combinations


@dataclass(frozen=True)
class And:
    args: tuple

    def __init__(self, *args):
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Or:
    args: tuple

    def __init__(self, *args):
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Not:
    arg: object


Formula = Union[Atom, Guard, Dnf, And, Or, Not, bool]


def evaluate(f: Formula, point: Mapping[Var, Scalar]) -> bool:
    """Exact truth value of ``f`` at a point binding all its variables."""
    if isinstance(f, bool):
        return f
    if isinstance(f, (Atom, Guard, Dnf)):
        return f.evaluate(point)
    if isinstance(f, And):
        return all(evaluate(a, point) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, point) for a in f.args)
    if isinstance(f, Not):
        return not evaluate(f.arg, point)
    raise TypeError(f"not a formula: {f!r}")


def _negate(f: Formula) -> Formula:
    if isinstance(f, bool):
        return not f
    if isinstance(f, Atom):
        return f.negate()
    if isinstance(f, Guard):
        if f.false:
            return True
        return Or(*(a.negate() for a in f.atoms))
    if isinstance(f, Dnf):
        return And(*(_negate(c) for c in f.clauses))
    if isinstance(f, And):
        return Or(*(_negate(a) for a in f.args))
    if isinstance(f, Or):
        return And(*(_negate(a) for a in f.args))
    if isinstance(f, Not):
        return f.arg
    raise TypeError(f"not a formula: {f!r}")


def _raw_dnf(f: Formula) -> list[Guard]:
    """DNF by distribution, merging atoms but without simplification."""
    if isinstance(f, bool):
        return [TRUE_GUARD] if f else []
    if isinstance(f, Atom):
        return [Guard.of((f,))]
    if isinstance(f, Guard):
        return [] if f.false else [f]
    if isinstance(f, Dnf):
        return list(f.clauses)
    if isinstance(f, Or):
        out: list[Guard] = []
        for a in f.args:
            out.extend(_raw_dnf(a))
        return out
    if isinstance(f, And):
        acc = [TRUE_GUARD]
        for a in f.args:
            part = _raw_dnf(a)
            acc = [g for x in acc for y in part if not (g := x.conj(y)).false]
            acc = _minimize(acc)
            if not acc:
                return []
        return acc
    if isinstance(f, Not):
        return _raw_dnf(_negate(f.arg))
    raise TypeError(f"not a formula: {f!r}")


def to_dnf(f: Formula) -> Dnf:
    """Equivalent simplified disjunctive normal form."""
    return simplify_dnf(Dnf(tuple(_raw_dnf(f))))


# ---------------------------------------------------------------------------
# substitution rules from equations


def _rule_of(p: Poly) -> tuple[Var, Poly] | None:
    """``(x, q)`` when ``p = c*(x - q)`` with ``x`` its greatest variable and ``c`` rational."""
    if p.is_constant():
        return None
    x = max(p.variables())
    cs = p.coeffs_in(x)
    if max(cs) != 1 or not cs[1].is_constant():
        return None
    return x, -cs.get(0, ZERO) / cs[1].constant_value()


def _rules_with_sources(eqs: Iterable[Poly]) -> tuple[dict[Var, Poly], dict[Var, int]]:
    rules: dict[Var, Poly] = {}
    sources: dict[Var, int] = {}
    for i, p in enumerate(eqs):
        rule = _rule_of(p.subs(rules))
        if rule is None:
            continue
        x, q = rule
        for y in rules:
            rules[y] = rules[y].subs({x: q})
        rules[x] = q
        sources[x] = i
    return rules, sources


def substitution_rules(eqs: Iterable[Poly]) -> dict[Var, Poly]:
    """Triangular substitution rules ``x -> q`` derived from equations ``p = 0``.

    An equation yields a rule when, after reduction by earlier rules, it is
    linear in its greatest variable with a rational coefficient.  Right-hand
    sides never mention rule variables, so one simultaneous substitution
    fully reduces a polynomial.
    """
    return _rules_with_sources(eqs)[0]


def reduce_poly(p: Poly, rules: Mapping[Var, Poly]) -> Poly:
    return p.subs(rules)


def _substitute(g: Guard) -> Guard:
    """Reduce every atom of ``g`` by the rules from its equations.

    An equation that produced a rule is replaced by the reduced rule itself.
    """
    eq_atoms = [a for a in g.atoms if a.rel is Rel.EQ]
    rules, sources = _rules_with_sources(a.poly for a in eq_atoms)
    if not rules:
        return g
    owner = {eq_atoms[i]: x for x, i in sources.items()}
    items: list[Atom | bool] = []
    for a in g.atoms:
        x = owner.get(a)
        if x is not None:
            items.append(atom(Poly.var(x) - rules[x], Rel.EQ))
        else:
            items.append(atom(a.poly.subs(rules), a.rel))
    return Guard.of(items)


# ---------------------------------------------------------------------------
# factor-based rewriting


@lru_cache(maxsize=8192)
def factor(p: Poly) -> tuple[Fraction, tuple[tuple[Poly, int], ...]]:
    """Cached :func:`factor_basic` returning tuples."""
    c, fs = factor_basic(p)
    return c, tuple(fs)


def _rewrite_atom(a: Atom) -> list[list[Atom | bool]]:
    """Equivalent DNF (as lists of conjuncts) obtained by factor splitting."""
    content, factors = factor(a.poly)
    sigma = _sign(content)
    rest: list[tuple[Poly, int]] = []
    for f, k in factors:
        ds = definite_sign(f)
        if ds:
            sigma *= ds**k
        else:
            rest.append((f, k))
    if a.rel is Rel.EQ:
        if not rest:
            return []
        return [[atom(f, Rel.EQ)] for f, _ in rest]
    if a.rel is Rel.NE:
        return [[atom(f, Rel.NE) for f, _ in rest]]
    odd = Poly.const(sigma)
    even = []
    for f, k in rest:
        if k % 2:
            odd = odd * f
        else:
            even.append(f)
    if a.rel.is_strict:
        return [[atom(odd, a.rel), *(atom(f, Rel.NE) for f in even)]]
    out = [[atom(odd, a.rel)]]
    out.extend([[atom(f, Rel.EQ)] for f in even])
    return out


def _factor_step(g: Guard) -> list[Guard] | None:
    """One rewriting step; ``None`` when no atom changes."""
    for i, a in enumerate(g.atoms):
        alts = _rewrite_atom(a)
        if len(alts) == 1 and len(alts[0]) == 1 and alts[0][0] == a:
            continue
        others = g.atoms[:i] + g.atoms[i + 1:]
        return [g2 for alt in alts if not (g2 := Guard.of((*others, *alt))).false]
    return None


def _simplify_clause(g: Guard) -> list[Guard]:
    out: list[Guard] = []
    seen: set[Guard] = set()
    work = [g]
    while work:
        h = work.pop()
        for _ in range(64):
            h2 = _substitute(h)
            if h2 == h:
                break
            h = h2
        if h.false or h in seen:
            continue
        seen.add(h)
        step = _factor_step(h)
        if step is None:
            out.append(h)
        else:
            work.extend(reversed(step))
    return out


def _subsumes(small: Guard, big: Guard) -> bool:
    """``big`` implies ``small`` syntactically."""
    return all(big.signs_of(a.poly) <= a.signs for a in small.atoms)


def _minimize(clauses: list[Guard]) -> list[Guard]:
    """Drop duplicates and clauses implied-subsumed by others; keep order."""
    uniq = list(dict.fromkeys(c for c in clauses if not c.false))
    maps = [{a.poly: a.signs for a in c.atoms} for c in uniq]

    def implies(big: int, small: int) -> bool:
        mb, ms = maps[big], maps[small]
        if len(ms) > len(mb):
            return False
        for p, s in ms.items():
            t = mb.get(p)
            if t is None or not t <= s:
                return False
        return True

    keep = []
    for i, c in enumerate(uniq):
        if any(j != i and implies(i, j) and (j < i or not implies(j, i)) for j in range(len(uniq))):
            continue
        keep.append(c)
    return keep


def _merge_pairs(clauses: list[Guard]) -> list[Guard]:
    """Merge two clauses differing only in the sign set of one polynomial."""
    changed = True
    while changed:
        changed = False
        for i in range(len(clauses)):
            for j in range(i + 1, len(clauses)):
                m = _merge(clauses[i], clauses[j])
                if m is not None:
                    clauses = clauses[:i] + [m] + clauses[i + 1:j] + clauses[j + 1:]
                    changed = True
                    break
            if changed:
                break
    return clauses


def _merge(a: Guard, b: Guard) -> Guard | None:
    if len(a) != len(b):
        return None
    pa = {x.poly: x.signs for x in a.atoms}
    pb = {x.poly: x.signs for x in b.atoms}
    if pa.keys() != pb.keys():
        return None
    diff = [p for p in pa if pa[p] != pb[p]]
    if len(diff) != 1:
        return None
    p = diff[0]
    items = [x for x in a.atoms if x.poly != p]
    items.append(atom_from_signs(p, pa[p] | pb[p]))
    return Guard.of(items)


def simplify(g: Guard) -> Dnf:
    """Equivalent DNF of a guard.

    Rules: constant evaluation, merging of atoms over the same polynomial,
    substitution of equations linear in their greatest variable with a
    rational coefficient, splitting products via :func:`factor_basic`, the
    positivity shortcut, subsumption, and merging of clauses that differ in
    the sign condition of a single polynomial.
    """
    if g.false:
        return Dnf.false()
    clauses = _simplify_clause(g)
    return _finish(clauses)


def simplify_dnf(d: Dnf) -> Dnf:
    clauses: list[Guard] = []
    for c in d.clauses:
        clauses.extend(_simplify_clause(c))
    return _finish(clauses)


def _finish(clauses: list[Guard]) -> Dnf:
    clauses = _minimize(clauses)
    merged = _merge_pairs(clauses)
    if merged != clauses:
        again: list[Guard] = []
        for c in merged:
            again.extend(_simplify_clause(c))
        clauses = _minimize(again)
    if any(c.is_true() for c in clauses):
        return Dnf.true()
    return Dnf(tuple(clauses))


# ---------------------------------------------------------------------------
# deduction


@lru_cache(maxsize=4096)
def _knowledge(g: Guard) -> tuple[dict[Var, Poly], dict[Poly, SignSet]]:
    rules = substitution_rules(g.equations())
    known: dict[Poly, SignSet] = {}

    def learn(p: Poly, signs: SignSet) -> None:
        c, q = canonicalize(p)
        if q.is_constant():
            return
        if c < 0:
            signs = frozenset(-s for s in signs)
        known[q] = known.get(q, ALL_SIGNS) & signs

    for a in g.atoms:
        polys = [a.poly]
        r = a.poly.subs(rules)
        if r != a.poly and not r.is_zero():
            polys.append(r)
        for p in polys:
            learn(p, a.signs)
            if 0 not in a.signs:
                for f, _ in factor(canonicalize(p)[1])[1]:
                    learn(f, frozenset((-1, 1)))
            elif a.signs == frozenset((0,)):
                fs = factor(canonicalize(p)[1])[1]
                if len(fs) == 1:
                    learn(fs[0][0], a.signs)
    return rules, known


def _poly_signs(p: Poly, known: Mapping[Poly, SignSet]) -> SignSet:
    """Signs ``p`` can take under the known facts."""
    if p.is_zero():
        return frozenset((0,))
    c, q = canonicalize(p)
    sc = _sign(c)
    if q.is_constant():
        return frozenset((sc,))
    s = known.get(q, ALL_SIGNS)
    ds = definite_sign(q)
    if ds:
        s = s & {ds}
    direct = frozenset(sc * x for x in s)
    content, factors = factor(q)
    acc = {_sign(content) * sc}
    for f, k in factors:
        fs = known.get(f, ALL_SIGNS)
        d = definite_sign(f)
        if d:
            fs = fs & {d}
        acc = {x * y**k for x in acc for y in fs}
    return direct & frozenset(acc)


def deduce(g: Guard, a: Atom | bool) -> bool:
    """True when ``g`` derivably entails ``a`` over the reals.

    Sound: a ``True`` answer implies semantic entailment.  Atoms that occur
    in ``g`` (after canonicalization) are always derivable.
    """
    if g.false:
        return True
    if isinstance(a, bool):
        return a
    if g.signs_of(a.poly) <= a.signs:
        return True
    rules, known = _knowledge(g)
    if _poly_signs(a.poly, known) <= a.signs:
        return True
    r = a.poly.subs(rules)
    return r != a.poly and _poly_signs(r, known) <= a.signs


def derivably_nonzero(g: Guard, p: Poly) -> bool:
    return deduce(g, atom(p, Rel.NE))


def derivably_zero(g: Guard, p: Poly) -> bool:
    return deduce(g, atom(p, Rel.EQ))


def is_false(g: Guard) -> bool:
    """True when ``g`` is derivably unsatisfiable over the reals."""
    if g.false:
        return True
    return simplify(g).is_false()
