from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import load
from vessiot.formula import Rel, atom
from vessiot.jet import (
    DifferentialSystem,
    contact_trans,
    contact_vertical,
    formal_derivative,
    prolong,
    reduction_rules,
    vessiot_matrix,
)
from vessiot.parsing import name_table, parse_poly
from vessiot.poly import Poly

N1 = name_table(("u",), ("chi",))
N3 = name_table(("u", "v", "w"))


def P(text: str, names=N3) -> Poly:
    return parse_poly(text, names)


def rows_text(m) -> list[list[str]]:
    return [[str(e) for e in row] for row in m.entries]


def test_system_validation():
    with pytest.raises(ValueError):
        DifferentialSystem(("u",), 1, ())
    with pytest.raises(ValueError):
        DifferentialSystem(("u",), 1, (P("u''", N1),))
    with pytest.raises(ValueError):
        DifferentialSystem(("u", "u"), 1, (P("u'", N1),))
    with pytest.raises(ValueError):
        DifferentialSystem(("t",), 1, (P("t", N1),))
    s = load("lh1")
    assert s.m == 3 and s.order == 1
    assert [str(v) for v in s.jet_vars()] == ["t", "u", "v", "w", "u'", "v'", "w'"]
    assert s.vessiot_unknowns() == ("b_u", "b_v", "b_w", "a")
    assert load("sphere").vessiot_unknowns() == ("b", "a")


def test_contact_fields():
    p = P("u'^2 + u^2 + t^2 - 1", N1)
    assert contact_trans(p, 1) == P("2*u*u' + 2*t", N1)
    assert contact_vertical(p, N1["u"].with_order(1)) == P("2*u'", N1)
    with pytest.raises(ValueError):
        contact_trans(P("u''", N1), 1)


def test_formal_derivative():
    assert formal_derivative(P("t*v*u' - t*u + 1")) == P("t*v*u'' + t*u'*v' + v*u' - t*u' - u")
    assert formal_derivative(P("t^3")) == P("3*t^2")
    assert formal_derivative(P("u")) == P("u'")


def test_reduction_rules():
    rules = reduction_rules(load("lh1").equations)
    assert {str(k): str(v) for k, v in rules.items()} == {"v'": "w", "w'": "0"}


def test_prolong_lh1():
    s = load("lh1")
    p2 = prolong(s, 2, reduce=True)
    assert p2.order == 2
    assert [str(q) for q in p2.equations] == [
        "t*v*u' - t*u + 1",
        "v' - w",
        "w'",
        "t*v*u'' + t*w*u' + v*u' - t*u' - u",
        "v''",
        "w''",
    ]
    raw = prolong(s, 2, reduce=False)
    assert str(raw.equations[3]) == "t*v*u'' + t*u'*v' + v*u' - t*u' - u"
    assert str(raw.equations[4]) == "v'' - w'"
    p3 = prolong(s, 3, reduce=True)
    assert "t*v*u''' + 2*t*w*u'' + 2*v*u'' - t*u'' + 2*w*u' - 2*u'" in [str(q) for q in p3.equations]
    assert prolong(s, 1) == s


def test_vessiot_matrices_of_fixtures():
    assert rows_text(vessiot_matrix(load("sphere"))) == [["u'", "u*u' + t"]]
    assert rows_text(vessiot_matrix(load("gather"))) == [["u*chi + 3*u'^2", "u'^2*chi - 1"]]
    lh1 = [
        ["t*v", "0", "0", "t*w*u' + v*u' - t*u' - u"],
        ["0", "1", "0", "0"],
        ["0", "0", "1", "0"],
    ]
    assert rows_text(vessiot_matrix(load("lh1"), reduce=True)) == lh1
    assert rows_text(vessiot_matrix(load("lh1"), rows="all", reduce=True)) == lh1
    assert rows_text(vessiot_matrix(load("lh2"), reduce=True))[0] == ["t*v", "0", "0", "t*w*u' + v*u' - u'"]


def test_vessiot_matrix_after_prolongation():
    s = load("lh1")
    m2 = vessiot_matrix(prolong(s, 2, reduce=True), reduce=True)
    assert rows_text(m2)[0] == ["t*v", "0", "0", "2*t*w*u'' + 2*v*u'' - t*u'' + 2*w*u' - 2*u'"]
    m3 = vessiot_matrix(prolong(s, 3, reduce=True), reduce=True)
    assert rows_text(m3)[0] == ["t*v", "0", "0", "3*t*w*u''' + 3*v*u''' - t*u''' + 6*w*u'' - 3*u''"]
    # with v = 0 the order two coefficient is t(2w-1)u'' + 2(w-1)u'
    a2 = m2.entries[0][3].subs({N3["v"]: Poly()})
    assert a2 == P("t*(2*w - 1)*u'' + 2*(w - 1)*u'")


def test_inequalities_are_carried():
    s = DifferentialSystem(("u",), 1, (P("u'^2 - u", N1),), (atom(P("u", N1), Rel.GT),))
    assert prolong(s, 2).inequalities == s.inequalities


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.integers(-2, 2), st.integers(-2, 2))
def test_formal_derivative_is_a_derivation(k, a, b):
    f = P(f"t^{k}*u' + {a}*u*v", N3)
    g = P(f"v'^2 + {b}*t*w", N3)
    lhs = formal_derivative(f * g)
    rhs = formal_derivative(f) * g + f * formal_derivative(g)
    assert lhs == rhs
