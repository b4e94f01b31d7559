from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from vessiot.formula import (
    And,
    Guard,
    Not,
    Or,
    Rel,
    atom,
    deduce,
    derivably_nonzero,
    derivably_zero,
    evaluate,
    is_false,
    simplify,
    to_dnf,
)
from vessiot.parsing import name_table, parse_formula, parse_poly
from vessiot.poly import Poly

NAMES = name_table(("u", "v", "w"), ("chi",))
T, U, V, W = (NAMES[n] for n in "tuvw")
U1 = U.with_order(1)
CHI = NAMES["chi"]


def P(text: str) -> Poly:
    return parse_poly(text, NAMES)


def G(*items: str) -> Guard:
    return Guard.of(parse_formula(s, NAMES) for s in items)


def test_rel_algebra():
    assert Rel.LT.negate() is Rel.GE
    assert Rel.LE.flip() is Rel.GE
    assert Rel.from_signs({-1, 1}) is Rel.NE
    assert Rel.EQ.signs == frozenset({0})
    assert Rel.GT.is_strict and not Rel.GE.is_strict


def test_atom_normalization():
    a = atom(-2 * P("u - t"), Rel.LT)
    assert str(a) == "u - t > 0"
    assert atom(Poly.const(-4), Rel.LE) is True
    assert atom(Poly.const(-4), Rel.GT) is False
    assert atom(Poly.const(0), Rel.EQ) is True
    assert atom(Fraction(-1, 3), Rel.LT) is True


def test_guard_merging():
    g = Guard.of([atom(P("u"), Rel.LE), atom(P("u"), Rel.GE)])
    assert str(g) == "u = 0"
    assert Guard.of([atom(P("u"), Rel.LT), atom(P("-u"), Rel.LT)]).false
    assert Guard.of([True]).is_true()
    assert str(Guard()) == "true" and str(Guard.of([False])) == "false"


def test_to_dnf_distributes_and_negates():
    f = And(Or(atom(P("u"), Rel.EQ), atom(P("v"), Rel.EQ)), Not(atom(P("t"), Rel.EQ)))
    d = to_dnf(f)
    assert str(d) == "(u = 0 and t != 0) or (v = 0 and t != 0)"
    for pt in ({T: 1, U: 0, V: 3}, {T: 0, U: 0, V: 0}, {T: 2, U: 1, V: 1}):
        assert d.evaluate(pt) == evaluate(f, pt)
    assert to_dnf(False).is_false()
    assert to_dnf(True).is_true()


def test_simplify_factor_splitting():
    assert str(simplify(G("t*v != 0"))) == "t != 0 and v != 0"
    d = simplify(G("t*v = 0"))
    assert len(d) == 2
    assert simplify(G("u'^2 + 1 = 0")).is_false()
    assert simplify(G("u'^2 + 1 > 0")).is_true()
    assert str(simplify(G("u^2 > 0"))) == "u != 0"


def test_simplify_sphere_guards():
    g = G("u' = 0", "u*u' + t != 0", "u'^2 + u^2 + t^2 - 1 = 0")
    assert str(simplify(g)) == "u' = 0 and u^2 + t^2 - 1 = 0 and t != 0"
    g = G("u' = 0", "u*u' + t = 0", "u'^2 + u^2 + t^2 - 1 = 0")
    d = simplify(g)
    assert sorted(str(c) for c in d) == ["t = 0 and u' = 0 and u + 1 = 0", "t = 0 and u' = 0 and u - 1 = 0"]


def test_simplify_keeps_readable_pivots():
    g = G("v = 0", "t*u - 1 = 0", "t*w*u' - t*u' - u != 0")
    assert "t*w*u' - t*u' - u != 0" in str(simplify(g))


def test_deduce():
    g = G("t != 0", "v != 0")
    assert deduce(g, atom(P("t*v"), Rel.NE))
    assert deduce(g, atom(P("t^2*v^2"), Rel.GT))
    assert not deduce(g, atom(P("t + v"), Rel.NE))
    assert deduce(G("u = 0"), atom(P("u*w"), Rel.EQ))
    assert deduce(G("u - t = 0", "t = 0"), atom(P("u"), Rel.EQ))
    assert deduce(Guard(), atom(P("u'^2 + 1"), Rel.GT))
    assert derivably_nonzero(G("t != 0"), P("3*t"))
    assert derivably_zero(G("u' = 0"), P("u*u'"))
    assert not derivably_zero(G("u' != 0"), P("u*u'"))
    assert deduce(Guard.of([False]), atom(P("u"), Rel.EQ))


def test_is_false():
    assert is_false(G("u = 0", "u - 1 = 0"))
    assert is_false(G("u'^2 + t^2 + 1 = 0"))
    assert not is_false(G("u'^2 - t = 0"))


# ---------------------------------------------------------------------------
# soundness on random points

VARS = [T, U, V]
REL = list(Rel)


@st.composite
def small_polys(draw):
    out = Poly()
    for _ in range(draw(st.integers(1, 3))):
        m = Poly.const(draw(st.integers(-2, 2)))
        for _ in range(draw(st.integers(0, 2))):
            m = m * Poly.var(draw(st.sampled_from(VARS)))
        out = out + m
    return out


@st.composite
def guards(draw):
    items = [atom(draw(small_polys()), draw(st.sampled_from(REL))) for _ in range(draw(st.integers(1, 3)))]
    if draw(st.booleans()):
        # products exercise factor splitting
        p, q = draw(small_polys()), draw(small_polys())
        items.append(atom(p * q, draw(st.sampled_from(REL))))
    return Guard.of(items)


GRID = [{T: a, U: b, V: c} for a in (-1, 0, 2) for b in (-1, 0, 1) for c in (0, Fraction(1, 2), -2)]


@settings(max_examples=150, deadline=None)
@given(guards())
def test_simplify_is_equivalent(g):
    d = simplify(g)
    for pt in GRID:
        assert d.evaluate(pt) == g.evaluate(pt)


@settings(max_examples=150, deadline=None)
@given(guards(), small_polys(), st.sampled_from(REL))
def test_deduce_is_sound(g, p, rel):
    a = atom(p, rel)
    if isinstance(a, bool) or not deduce(g, a):
        return
    for pt in GRID:
        if g.evaluate(pt):
            assert a.evaluate(pt)


@settings(max_examples=100, deadline=None)
@given(guards(), guards())
def test_dnf_of_combinations(g, h):
    for f in (And(g, Not(h)), Or(g, h), Not(And(g, h))):
        d = to_dnf(f)
        for pt in GRID:
            assert d.evaluate(pt) == evaluate(f, pt)


def test_sampler_points_satisfy_clause():
    from vessiot.sampling import sample_clause

    rng = random.Random(3)
    g = G("v = 0", "t*u - 1 = 0")
    pts = sample_clause(g, [T, U, V, W, U1], 20, rng)
    assert len(pts) == 20
    assert all(g.evaluate(p) for p in pts)
    assert all(p[T] != 0 for p in pts)
