from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import SYSTEMS
from vessiot.formula import to_dnf
from vessiot.parsing import (
    ParseError,
    format_system,
    name_table,
    parse_formula,
    parse_poly,
    parse_system,
    parse_system_file,
)

N = name_table(("u", "v"), ("chi",))


def test_poly_syntax():
    assert str(parse_poly("u'^2 + u^2 + t^2 - 1", N)) == "u'^2 + u^2 + t^2 - 1"
    assert parse_poly("D(u,2)", N) == parse_poly("u''", N)
    assert str(parse_poly("(u - 1)*(u + 1)/2", N)) == "1/2*u^2 - 1/2"
    assert str(parse_poly("-chi*u' + 3/4", N)) == "-u'*chi + 3/4"


def test_formula_precedence():
    f = to_dnf(parse_formula("u > 0 and v < 0 or u = 0", N))
    assert str(f) == "(v < 0 and u > 0) or (u = 0)"
    assert str(to_dnf(parse_formula("u' = chi", N))) == "chi - u' = 0"


@pytest.mark.parametrize(
    "text, message",
    [
        ("funcs: u\neq: u + ", "line 2, column 8: unexpected 'end of input'"),
        ("funcs: u\neq: t", "line 2, column 5: equation does not involve an unknown function"),
        ("funcs: u\neq: x*u", "line 2, column 5: undeclared identifier 'x'"),
        ("funcs: u\norder: 1\neq: u''", "line 2, column 1: derivative of order 2 exceeds declared order 1"),
        ("funcs: u\nfuncs: v\neq: u", "line 2, column 1: duplicate 'funcs' line"),
        ("funcs: u\nfoo: 1\neq: u", "line 2, column 1: unknown key 'foo'"),
        ("funcs: t\neq: t", "line 1, column 1: 't' is reserved for the independent variable"),
        ("funcs: u\neq: u/u", "line 2, column 6: division only by nonzero constants"),
        ("funcs: u\neq: u^-1", "line 2, column 8: exponent must be a nonnegative integer"),
        ("eq: u", "line 1, column 1: missing 'funcs:' declaration"),
    ],
)
def test_errors_carry_positions(text, message):
    with pytest.raises(ParseError) as err:
        parse_system(text)
    assert str(err.value) == message


def test_fixture_files():
    sf = parse_system_file((SYSTEMS / "lh1.sys").read_text())
    assert sf.system.funcs == ("u", "v", "w")
    assert sf.prolong is None and sf.reduce is None
    assert [str(p) for p in sf.system.equations] == ["t*v*u' - t*u + 1", "v' - w", "w'"]
    gather = parse_system((SYSTEMS / "gather.sys").read_text())
    assert [p.name for p in gather.param_vars()] == ["chi"]


def test_options_and_inequalities():
    sf = parse_system_file("funcs: u\nparams: a\neq: u'^2 - a\nineq: u > 0\nprolong: 3\nreduce: off\n")
    assert sf.prolong == 3 and sf.reduce is False
    assert [str(a) for a in sf.system.inequalities] == ["u > 0"]


@pytest.mark.parametrize("name", ["sphere", "gather", "lh1", "lh2"])
def test_format_roundtrip(name):
    sf = parse_system_file((SYSTEMS / f"{name}.sys").read_text())
    again = parse_system_file(format_system(sf.system, sf.prolong, sf.reduce))
    assert again.system == sf.system


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["u", "v", "u'", "t", "chi", "2", "1/3"]), min_size=1, max_size=4), st.integers(1, 3))
def test_system_roundtrip_property(factors, k):
    eq = "*".join(factors) + f" + u'^{k}"
    sf = parse_system_file(f"funcs: u, v\nparams: chi\neq: {eq}\n")
    assert parse_system_file(format_system(sf.system)).system == sf.system
