"""Parametric Gaussian elimination with guard-producing case distinctions.

Given a matrix ``A`` whose entries are polynomials in some parameters, the
elimination splits parameter space into disjoint regions described by guards
(conjunctions of equations and inequations).  On each region the matrix has
a fixed row echelon shape, and the kernel of ``A`` is described by one
:class:`ParamSolution`.

Columns holding the distinguished unknowns ``y`` are pivoted only after all
other columns are exhausted.  With ``y = (a,)`` this forces a dependent
``a`` to be identically zero.

Cases are processed with an explicit stack.  A popped case is dropped if its
guard is refutable; otherwise a derivably nonzero entry is used as pivot, or
the elimination branches on an entry of unknown status, pushing the guard
extended by ``entry != 0`` and by ``entry = 0`` (the entry is zeroed in the
latter).  Entries that are derivably zero are replaced by zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence

from .formula import TRUE_GUARD, Guard, Rel, atom, deduce, is_false
from .poly import ONE, Poly, RatFunc, Scalar, Var, rational_content

UNKNOWN, ZERO_STATUS, NONZERO = -1, 0, 1


class InternalDefect(RuntimeError):
    """An invariant of the elimination was violated."""


@dataclass(frozen=True)
class EliminationTask:
    """Matrix with column unknowns; ``y`` lists the unknowns pivoted last."""

    matrix: tuple[tuple[Poly, ...], ...]
    unknowns: tuple[str, ...]
    y: tuple[str, ...] = ()
    guard: Guard = TRUE_GUARD

    def __post_init__(self) -> None:
        n = len(self.unknowns)
        if n < 1:
            raise ValueError("at least one unknown is required")
        if any(len(r) != n for r in self.matrix):
            raise ValueError("every row must have one entry per unknown")
        if not set(self.y) <= set(self.unknowns):
            raise ValueError("y must be a sublist of the unknowns")
        object.__setattr__(self, "matrix", tuple(tuple(Poly.coerce(e) for e in r) for r in self.matrix))

    @classmethod
    def of(cls, rows: Sequence[Sequence[Poly | Scalar]], unknowns: Sequence[str], y: Sequence[str] = (), guard: Guard = TRUE_GUARD) -> EliminationTask:
        return cls(tuple(tuple(Poly.coerce(e) for e in r) for r in rows), tuple(unknowns), tuple(y), guard)


@dataclass(frozen=True)
class LinearForm:
    """``sum(coeff_k * r_k)`` with rational-function coefficients."""

    coeffs: tuple[tuple[int, RatFunc], ...] = ()

    @classmethod
    def indeterminate(cls, k: int) -> LinearForm:
        return cls(((k, RatFunc(ONE)),))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: LinearForm) -> LinearForm:
        acc = dict(self.coeffs)
        for k, c in other.coeffs:
            s = acc[k] + c if k in acc else c
            if s.is_zero():
                acc.pop(k, None)
            else:
                acc[k] = s
        return LinearForm(tuple(sorted(acc.items())))

    def scale(self, c: RatFunc) -> LinearForm:
        if c.is_zero():
            return LinearForm()
        return LinearForm(tuple((k, v * c) for k, v in self.coeffs))

    def indeterminates(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.coeffs)

    def evaluate(self, point: Mapping[Var, Scalar], r: Sequence[Fraction]) -> Fraction:
        return sum((c.evaluate(point) * r[k - 1] for k, c in self.coeffs), Fraction(0))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, (k, c) in enumerate(self.coeffs):
            term = _scaled_indeterminate(c, k)
            if i and term.startswith("-"):
                parts.append(" - " + term[1:])
            elif i:
                parts.append(" + " + term)
            else:
                parts.append(term)
        return "".join(parts)


def _scaled_indeterminate(c: RatFunc, k: int) -> str:
    r = f"r{k}"
    if c.is_polynomial() and c.num.is_constant():
        v = c.num.constant_value() / c.den.constant_value()
        if v == 1:
            return r
        if v == -1:
            return "-" + r
        return f"{v}*{r}"
    neg = c.num.leading_coefficient() < 0
    num = -c.num if neg else c.num
    body = str(RatFunc(num, c.den, reduced=True))
    if len(num) > 1 and c.den == ONE:
        body = f"({body})"
    return f"{'-' if neg else ''}{body}*{r}"


@dataclass(frozen=True)
class ParamSolution:
    """Parametric kernel description valid on one guard region.

    ``values[i]`` expresses unknown ``i`` (original order) as a linear form
    in fresh indeterminates ``r_1..r_k``; ``free[k-1]`` is the unknown bound
    to ``r_k``.  ``permutation[j]`` is the unknown in column ``j`` of the
    final echelon form; its first ``rank`` columns are pivot columns.
    """

    unknowns: tuple[str, ...]
    values: tuple[LinearForm, ...]
    free: tuple[int, ...]
    permutation: tuple[int, ...]
    rank: int

    @property
    def n_free(self) -> int:
        return len(self.free)

    def index(self, name: str) -> int:
        return self.unknowns.index(name)

    def is_free(self, name: str) -> bool:
        return self.index(name) in self.free

    def value(self, name: str) -> LinearForm:
        return self.values[self.index(name)]

    def denominators(self) -> list[Poly]:
        out: list[Poly] = []
        for v in self.values:
            for _, c in v.coeffs:
                if not c.den.is_constant() and c.den not in out:
                    out.append(c.den)
        return out

    def instantiate(self, point: Mapping[Var, Scalar], r: Sequence[Fraction]) -> list[Fraction]:
        return [v.evaluate(point, r) for v in self.values]

    def basis(self, point: Mapping[Var, Scalar]) -> list[list[Fraction]]:
        """Kernel vectors obtained by setting one indeterminate to one."""
        out = []
        for k in range(self.n_free):
            r = [Fraction(0)] * self.n_free
            r[k] = Fraction(1)
            out.append(self.instantiate(point, r))
        return out

    def equations(self) -> list[str]:
        return [f"{n} = {v}" for n, v in zip(self.unknowns, self.values)]

    def __str__(self) -> str:
        return "{" + ", ".join(self.equations()) + "}"


@dataclass(frozen=True)
class EliminationCase:
    """One output pair: a guard and the parametric solution valid under it."""

    guard: Guard
    solution: ParamSolution
    pivots: tuple[Poly, ...]
    pivot_columns: tuple[str, ...]
    echelon: tuple[tuple[Poly, ...], ...]
    y_dim: int


@dataclass
class EliminationOutput:
    cases: list[EliminationCase]
    y: tuple[str, ...]
    pushes: int = 0
    measure_violations: int = 0

    def __iter__(self):
        return iter(self.cases)

    def __len__(self) -> int:
        return len(self.cases)

    def matching(self, point: Mapping[Var, Scalar]) -> list[EliminationCase]:
        return [c for c in self.cases if c.guard.evaluate(point)]


@dataclass
class _Frame:
    guard: Guard
    matrix: list[list[Poly]]
    p: int
    perm: list[int]
    status: dict[tuple[int, int], int] = field(default_factory=dict)
    measure: tuple[int, int] | None = None


def _normalize_row(row: list[Poly], start: int) -> list[Poly]:
    nz = [e for e in row[start:] if not e.is_zero()]
    if not nz:
        return row
    c = Fraction(0)
    for e in nz:
        rc = rational_content(e)
        c = rc if c == 0 else Fraction(gcd(c.numerator, rc.numerator), lcm(c.denominator, rc.denominator))
    if c == 1:
        return row
    return [e * (1 / c) for e in row]


def _entry_key(e: Poly, i: int, j: int) -> tuple:
    return (not e.is_constant(), e.degree(), len(e), i, j)


def _classify_entries(fr: _Frame, M: int, N: int) -> None:
    """Fill ``fr.status`` for the active block, zeroing derivably zero entries."""
    g = fr.guard
    for i in range(fr.p, M):
        row = fr.matrix[i]
        for j in range(fr.p, N):
            e = row[j]
            if e.is_zero():
                fr.status[(i, j)] = ZERO_STATUS
                continue
            st = fr.status.get((i, j), UNKNOWN)
            if st == UNKNOWN:
                if deduce(g, atom(e, Rel.NE)):
                    st = NONZERO
                elif deduce(g, atom(e, Rel.EQ)):
                    st = ZERO_STATUS
            if st == ZERO_STATUS:
                row[j] = Poly()
            fr.status[(i, j)] = st


def _measure(fr: _Frame, M: int, N: int) -> tuple[int, int]:
    unknown = sum(
        1 for i in range(fr.p, M) for j in range(fr.p, N) if fr.status.get((i, j), UNKNOWN) == UNKNOWN
    )
    return (min(M, N) - fr.p, unknown)


def parametric_gauss(task: EliminationTask, *, check_termination: bool = False) -> EliminationOutput:
    """Run the guarded elimination on ``task``.

    With ``check_termination`` every pushed case is checked to have a
    lexicographically smaller measure ``(min(M, N) - p, #unknown entries)``
    than the case it came from; a violation raises :class:`InternalDefect`.
    Violations are always counted in the output.
    """
    M, N = len(task.matrix), len(task.unknowns)
    ynames = set(task.y)
    out = EliminationOutput([], task.y)
    start = _Frame(task.guard, [list(r) for r in task.matrix], 0, list(range(N)))
    stack = [start]

    def push(parent: _Frame, child: _Frame) -> None:
        out.pushes += 1
        _classify_entries(child, M, N)
        child.measure = _measure(child, M, N)
        if not child.measure < parent.measure:
            out.measure_violations += 1
            if check_termination:
                raise InternalDefect(f"measure did not decrease: {parent.measure} -> {child.measure}")
        stack.append(child)

    _classify_entries(start, M, N)
    start.measure = _measure(start, M, N)
    while stack:
        fr = stack.pop()
        if is_false(fr.guard):
            continue
        p = fr.p
        cols = [j for j in range(p, N) if task.unknowns[fr.perm[j]] not in ynames]
        ycols = [j for j in range(p, N) if task.unknowns[fr.perm[j]] in ynames]
        acted = False
        if p < min(M, N):
            for phase in (cols, ycols):
                cand = [(i, j) for i in range(p, M) for j in phase if fr.status[(i, j)] == NONZERO]
                if cand:
                    i, j = min(cand, key=lambda ij: _entry_key(fr.matrix[ij[0]][ij[1]], *ij))
                    push(fr, _pivot(fr, i, j, M, N))
                    acted = True
                    break
                cand = [(i, j) for i in range(p, M) for j in phase if fr.status[(i, j)] == UNKNOWN]
                if cand:
                    i, j = min(cand, key=lambda ij: _entry_key(fr.matrix[ij[0]][ij[1]], *ij))
                    e = fr.matrix[i][j]
                    zeroed = [list(r) for r in fr.matrix]
                    zeroed[i][j] = Poly()
                    zs = dict(fr.status)
                    zs[(i, j)] = ZERO_STATUS
                    ns = dict(fr.status)
                    ns[(i, j)] = NONZERO
                    push(fr, _Frame(fr.guard.conj(atom(e, Rel.EQ)), zeroed, p, list(fr.perm), zs))
                    push(fr, _Frame(fr.guard.conj(atom(e, Rel.NE)), [list(r) for r in fr.matrix], p, list(fr.perm), ns))
                    acted = True
                    break
        if not acted:
            out.cases.append(_emit(fr, task, M, N))
    return out


def _pivot(fr: _Frame, i: int, j: int, M: int, N: int) -> _Frame:
    p = fr.p
    a = [list(r) for r in fr.matrix]
    perm = list(fr.perm)
    a[p], a[i] = a[i], a[p]
    for r in a:
        r[p], r[j] = r[j], r[p]
    perm[p], perm[j] = perm[j], perm[p]
    piv = a[p][p]
    for r in range(p + 1, M):
        f = a[r][p]
        if f.is_zero():
            continue
        row = [a[r][c] if c < p else piv * a[r][c] - f * a[p][c] for c in range(N)]
        row[p] = Poly()
        a[r] = _normalize_row(row, p + 1)
    return _Frame(fr.guard, a, p + 1, perm)


def _emit(fr: _Frame, task: EliminationTask, M: int, N: int) -> EliminationCase:
    for i in range(fr.p, M):
        for j in range(fr.p, N):
            if not fr.matrix[i][j].is_zero():
                raise InternalDefect("emitted a case with a nonzero entry below the echelon form")
    sol = construct_solution(fr.matrix, fr.perm, fr.p, task.unknowns)
    ynames = set(task.y)
    for name in task.y:
        if not sol.is_free(name):
            v = sol.value(name)
            if any(task.unknowns[sol.free[k - 1]] not in ynames for k in v.indeterminates()):
                raise InternalDefect(f"dependent {name} involves non-y indeterminates")
    pivots = tuple(fr.matrix[k][k] for k in range(fr.p))
    pcols = tuple(task.unknowns[fr.perm[k]] for k in range(fr.p))
    return EliminationCase(
        fr.guard,
        sol,
        pivots,
        pcols,
        tuple(tuple(r) for r in fr.matrix),
        intersection_dim(sol, task.y),
    )


def construct_solution(matrix: Sequence[Sequence[Poly]], perm: Sequence[int], rank: int, unknowns: Sequence[str]) -> ParamSolution:
    """Back substitution on an echelon form with ``rank`` nonzero pivots.

    Columns ``rank..N-1`` become the indeterminates ``r_1, r_2, ...`` in
    column order; every dependent unknown is expressed through them only.
    """
    N = len(unknowns)
    values: dict[int, LinearForm] = {}
    free = []
    for k, j in enumerate(range(rank, N), start=1):
        values[perm[j]] = LinearForm.indeterminate(k)
        free.append(perm[j])
    for i in reversed(range(rank)):
        acc = LinearForm()
        for j in range(i + 1, N):
            e = matrix[i][j]
            if not e.is_zero():
                acc = acc + values[perm[j]].scale(RatFunc(e))
        values[perm[i]] = acc.scale(RatFunc(-1, matrix[i][i]))
    return ParamSolution(
        tuple(unknowns),
        tuple(values[i] for i in range(N)),
        tuple(free),
        tuple(perm),
        rank,
    )


def intersection_dim(sol: ParamSolution, y: Sequence[str]) -> int:
    """Dimension of the solution space intersected with ``{y = 0}``.

    Setting the free ``y`` unknowns to zero also zeroes the dependent ones,
    because dependent ``y`` unknowns only involve free ``y`` indeterminates.
    """
    yset = set(y)
    free_y = 0
    for name in y:
        if sol.is_free(name):
            free_y += 1
        else:
            v = sol.value(name)
            if any(sol.unknowns[sol.free[k - 1]] not in yset for k in v.indeterminates()):
                raise InternalDefect(f"cannot propagate {name} = 0")
    return sol.n_free - free_y
