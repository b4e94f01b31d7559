"""Exact sign conditions for univariate rational polynomials of any degree.

Real roots are isolated with Sturm sequences over the rationals.  A
conjunction of sign conditions is satisfiable iff it holds at one of the
roots or at a rational point between consecutive roots; signs at irrational
roots are read off after refining the isolating interval until the queried
polynomial has no root in it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .poly import Poly, Var

Dense = list[Fraction]  # coefficients, constant term first


def to_dense(p: Poly, x: Var) -> Dense:
    if p.variables() - {x}:
        raise ValueError(f"{p} is not univariate in {x}")
    cs = p.coeffs_in(x)
    if not cs:
        return []
    n = max(cs)
    return [cs[k].constant_value() if k in cs else Fraction(0) for k in range(n + 1)]


def _trim(a: Dense) -> Dense:
    while a and a[-1] == 0:
        a.pop()
    return a


def evaluate(a: Sequence[Fraction], c: Fraction) -> Fraction:
    acc = Fraction(0)
    for coef in reversed(a):
        acc = acc * c + coef
    return acc


def derivative(a: Dense) -> Dense:
    return [k * a[k] for k in range(1, len(a))]


def rem(a: Dense, b: Dense) -> Dense:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        f = a[-1] / lb
        shift = len(a) - 1 - db
        for k in range(len(b)):
            a[shift + k] -= f * b[k]
        a.pop()
        _trim(a)
    return a


def _monic(a: Dense) -> Dense:
    return [c / a[-1] for c in a] if a else a


def gcd(a: Dense, b: Dense) -> Dense:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _monic(rem(a, b))
    return _monic(a)


def quo(a: Dense, b: Dense) -> Dense:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [Fraction(0)] * max(len(a) - db, 1)
    while len(a) - 1 >= db and a:
        f = a[-1] / lb
        shift = len(a) - 1 - db
        q[shift] = f
        for k in range(len(b)):
            a[shift + k] -= f * b[k]
        a.pop()
        _trim(a)
    return _trim(q)


def mul(a: Dense, b: Dense) -> Dense:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def square_free(a: Dense) -> Dense:
    g = gcd(a, derivative(a))
    return _monic(quo(a, g)) if len(g) > 1 else _monic(a)


def sturm(a: Dense) -> list[Dense]:
    seq = [a, derivative(a)]
    while len(seq[-1]) > 1:
        r = rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _variations(seq: list[Dense], c: Fraction) -> int:
    signs = [v for v in (evaluate(s, c) for s in seq) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u > 0) != (v > 0))


def count_roots(seq: list[Dense], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in ``(lo, hi]`` of the square-free head of ``seq``."""
    return _variations(seq, lo) - _variations(seq, hi)


def root_bound(a: Dense) -> Fraction:
    lead = abs(a[-1])
    return 1 + max((abs(c) / lead for c in a[:-1]), default=Fraction(0))


def _split_point(f: Dense, lo: Fraction, hi: Fraction) -> Fraction:
    mid = (lo + hi) / 2
    step = (hi - lo) / 4
    while evaluate(f, mid) == 0:
        step /= 2
        mid = (lo + hi) / 2 + step
    return mid


def isolate(f: Dense) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(lo, hi)`` with one root of square-free ``f`` each.

    Endpoints are never roots of ``f``; intervals are sorted.
    """
    if len(f) <= 1:
        return []
    seq = sturm(f)
    b = root_bound(f)
    out = []
    work = [(-b, b)]
    while work:
        lo, hi = work.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = _split_point(f, lo, hi)
        work.append((mid, hi))
        work.append((lo, mid))
    out.sort()
    return out


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign_at_root(p: Dense, f: Dense, fseq: list[Dense], lo: Fraction, hi: Fraction) -> int:
    """Sign of ``p`` at the unique root of ``f`` in ``(lo, hi)``."""
    if not p:
        return 0
    if len(p) == 1:
        return _sign(p[0])
    g = gcd(p, f)
    if len(g) > 1 and count_roots(sturm(g), lo, hi) == 1:
        return 0
    pseq = sturm(square_free(p))
    while count_roots(pseq, lo, hi) > 0:
        mid = (lo + hi) / 2
        fm = evaluate(f, mid)
        if fm == 0:
            return _sign(evaluate(p, mid))
        if count_roots(fseq, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return _sign(evaluate(p, hi))


def satisfiable(conditions: Iterable[tuple[Dense, frozenset[int]]]) -> bool:
    """Whether some real number gives every polynomial a sign in its set."""
    conds = [(_trim(list(p)), s) for p, s in conditions]
    f: Dense = [Fraction(1)]
    for p, _ in conds:
        if len(p) > 1:
            f = mul(f, square_free(p))
    f = square_free(f) if len(f) > 1 else f
    intervals = isolate(f)
    points: list[Fraction] = []
    if intervals:
        points.append(intervals[0][0])
        points.extend(hi for _, hi in intervals)
    else:
        points.append(Fraction(0))
    for c in points:
        if all(_sign(evaluate(p, c)) in s for p, s in conds):
            return True
    fseq = sturm(f) if len(f) > 1 else []
    for lo, hi in intervals:
        if all(_sign_at_root(p, f, fseq, lo, hi) in s for p, s in conds):
            return True
    return False
