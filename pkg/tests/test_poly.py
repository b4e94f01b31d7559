from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vessiot.parsing import parse_poly
from vessiot.poly import (
    ONE,
    ZERO,
    Poly,
    RatFunc,
    Var,
    canonicalize,
    definite_sign,
    divide_exact,
    factor_basic,
    format_poly,
    gcd,
    monomial_content,
    square_free,
)

T = Var.time()
U = Var.dep(0, 0, "u")
U1 = Var.dep(0, 1, "u")
V = Var.dep(1, 0, "v")
CHI = Var.param(0, "chi")
t, u, ud, v, chi = (Poly.var(x) for x in (T, U, U1, V, CHI))
def test_variable_order():
    assert T < U < V < U1 < CHI
    assert str(U1) == "u'"
    assert str(Var.dep(0, 4, "u")) == "D(u,4)"
    assert U.derivative(2) == Var.dep(0, 2, "u")
    with pytest.raises(ValueError):
        T.derivative()


def test_arithmetic_and_printing():
    p = ud**2 + u**2 + t**2 - 1
    assert str(p) == "u'^2 + u^2 + t^2 - 1"
    assert (p - p).is_zero()
    assert (u + 1) * (u - 1) == u**2 - 1
    assert (u / 2).terms[((U, 1),)] == Fraction(1, 2)
    assert format_poly(-u * ud * chi + Fraction(3, 4)) == "-u*u'*chi + 3/4"
    assert ZERO.degree() == -1


def test_inspection():
    p = chi * u * ud + ud**3 - t
    assert p.degree() == 3
    assert p.degree_in(U1) == 3
    assert p.coeffs_in(U1) == {0: -t, 1: chi * u, 3: ONE}
    assert p.lead_coeff_in(U1) == ONE
    assert p.jet_order() == 1
    assert p.variables() == {T, U, U1, CHI}
    assert p.evaluate({T: 1, U: 2, U1: 1, CHI: 3}) == 6


def test_diff_and_subs():
    p = ud**2 * u + t
    assert p.diff(U1) == 2 * ud * u
    assert p.diff(T) == ONE
    assert p.subs({U: t + 1}) == ud**2 * t + ud**2 + t


def test_canonicalize():
    c, q = canonicalize(-2 * u * t + 4 * t)
    assert q == u * t - 2 * t
    assert c == -2
    assert canonicalize(q) == (1, q)
    assert canonicalize(Poly.const(Fraction(-3, 2))) == (Fraction(-3, 2), ONE)


def test_divide_exact_and_gcd():
    a = (u + t) * (u - 1) ** 2
    assert divide_exact(a, u - 1) == (u + t) * (u - 1)
    assert divide_exact(a, u + 2) is None
    assert gcd(a, (u - 1) * (t + 3)) == u - 1
    assert gcd(2 * u * t, 4 * t) == t
    assert gcd(u**2 - 1, t + 1) == ONE


def test_factor_basic_examples():
    c, fs = factor_basic(t * v)
    assert c == 1 and fs == [(t, 1), (v, 1)]
    c, fs = factor_basic(2 * u**2 - 2)
    assert c == 2 and sorted(str(f) for f, _ in fs) == ["u + 1", "u - 1"]
    c, fs = factor_basic(-(u - t) ** 2 * (u * t + 1))
    assert c == -1
    assert {str(f): k for f, k in fs} == {"u - t": 2, "t*u + 1": 1}
    assert square_free(u**2 + 1) == [(u**2 + 1, 1)]
    assert monomial_content(u**2 * t + u * t**3) == {T: 1, U: 1}


def test_definite_sign():
    assert definite_sign(ud**2 + 1) == 1
    assert definite_sign(-(u**2) - t**4 - 2) == -1
    assert definite_sign(u**2 + t) == 0
    assert definite_sign(Poly.const(0)) == 0


def test_ratfunc():
    r = RatFunc(u * u - 1, u - 1)
    assert r.is_polynomial() and r.num == u + 1
    s = RatFunc(ud, 2 * t)
    assert str(s) == "1/2*u'/t"
    assert (s + s) == RatFunc(ud, t)
    assert (s * RatFunc(t)) == RatFunc(ud / 2)
    with pytest.raises(ZeroDivisionError):
        RatFunc(u, ZERO)
    assert RatFunc(u, t).evaluate({U: 1, T: 2}) == Fraction(1, 2)


# ---------------------------------------------------------------------------
# properties

VARS = [T, U, U1, CHI]
small = st.integers(-3, 3)


@st.composite
def polys(draw, max_terms: int = 4, max_deg: int = 3):
    out = ZERO
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(small)
        mono = Poly.const(c)
        for _ in range(draw(st.integers(0, max_deg))):
            mono = mono * Poly.var(draw(st.sampled_from(VARS)))
        out = out + mono
    return out


points = st.fixed_dictionaries({v: st.fractions(-3, 3, max_denominator=4) for v in VARS})


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO


@given(polys(), polys(), points)
def test_evaluation_is_homomorphic(a, b, pt):
    assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
    assert (a + b).evaluate(pt) == a.evaluate(pt) + b.evaluate(pt)


@given(polys(), polys(), polys(max_terms=2, max_deg=2))
def test_subs_commutes_with_products(a, b, q):
    m = {U: q}
    assert (a * b).subs(m) == a.subs(m) * b.subs(m)
    assert (a + b).subs(m) == a.subs(m) + b.subs(m)


@given(polys(), polys(), st.sampled_from(VARS))
def test_leibniz_rule(a, b, x):
    assert (a * b).diff(x) == a.diff(x) * b + a * b.diff(x)


@given(polys())
def test_canonicalize_idempotent(p):
    c, q = canonicalize(p)
    assert c * q == p
    if not p.is_zero():
        assert canonicalize(q) == (1, q)
        assert q.leading_coefficient() > 0


@settings(max_examples=60, deadline=None)
@given(polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2))
def test_factor_basic_reconstructs(a, b):
    p = a * b
    if p.is_zero():
        return
    c, fs = factor_basic(p)
    prod = Poly.const(c)
    for f, k in fs:
        assert canonicalize(f)[0] == 1
        prod = prod * f**k
    assert prod == p


@settings(max_examples=60, deadline=None)
@given(polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2), polys(max_terms=2, max_deg=2))
def test_gcd_divides(a, b, g):
    if (a * g).is_zero() or (b * g).is_zero():
        return
    d = gcd(a * g, b * g)
    assert divide_exact(a * g, d) is not None
    assert divide_exact(b * g, d) is not None
    if not g.is_constant():
        assert divide_exact(d, canonicalize(g)[1]) is not None


@given(polys())
def test_print_parse_roundtrip(p):
    names = {"t": T, "u": U, "chi": CHI}
    assert parse_poly(format_poly(p), names) == p
