"""Text syntax for polynomials, guard formulas and system files.

Polynomials use ``+ - * / ^`` with integer exponents and rational literals.
Division is only allowed by nonzero constants.  Variable tokens are ``t``,
a declared function name followed by primes (``u``, ``u'``, ``u''``), the
form ``D(u,k)`` for the ``k``-th derivative, and declared parameter names.

A system file is a sequence of ``key: value`` lines::

    # comment
    funcs: u, v
    params: chi
    order: 1
    eq: u'^2 + u^2 + t^2 - 1
    eq: v' = u
    ineq: v > 0
    prolong: 2
    reduce: on
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .formula import And, Atom, Formula, Or, Rel, atom
from .jet import DifferentialSystem
from .poly import Poly, Var

TIME_NAME = "t"

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<rel><=|>=|!=|=|<|>)
  | (?P<op>[-+*/^(),])
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*'*)
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    """Syntax or declaration error with a 1-based source position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        if mt.lastgroup != "ws":
            out.append(_Tok(mt.lastgroup, mt.group(), col0 + pos))
        pos = mt.end()
    out.append(_Tok("end", "", col0 + len(text)))
    return out


class _Parser:
    def __init__(self, text: str, names: dict[str, Var], line: int = 1, col0: int = 1):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.names = names
        self.line = line

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok.col)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind != "end":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            tok = self.peek()
            raise self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")

    def done(self) -> None:
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")

    # polynomial grammar

    def expr(self) -> Poly:
        out = self.term()
        while self.peek().text in ("+", "-"):
            sign = self.next().text
            rhs = self.term()
            out = out + rhs if sign == "+" else out - rhs
        return out

    def term(self) -> Poly:
        out = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.next()
            rhs = self.unary()
            if op.text == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise self.error("division only by nonzero constants", op)
                out = out / rhs.constant_value()
        return out

    def unary(self) -> Poly:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.accept("^"):
            neg = self.accept("-")
            tok = self.next()
            if tok.kind != "num" or "." in tok.text or neg:
                raise self.error("exponent must be a nonnegative integer", tok)
            return base ** int(tok.text)
        return base

    def atom(self) -> Poly:
        tok = self.next()
        if tok.kind == "num":
            return Poly.const(Fraction(tok.text))
        if tok.text == "(":
            out = self.expr()
            self.expect(")")
            return out
        if tok.kind == "name":
            if tok.text == "D" and self.peek().text == "(":
                return self._d_form(tok)
            return Poly.var(self._lookup(tok))
        raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def _d_form(self, head: _Tok) -> Poly:
        self.expect("(")
        name = self.next()
        if name.kind != "name" or "'" in name.text:
            raise self.error("expected a function name", name)
        self.expect(",")
        k = self.next()
        if k.kind != "num" or "." in k.text:
            raise self.error("expected a derivative order", k)
        self.expect(")")
        base = self._lookup(name)
        if not base.is_dep:
            raise self.error(f"{name.text!r} is not an unknown function", name)
        return Poly.var(base.with_order(int(k.text)))

    def _lookup(self, tok: _Tok) -> Var:
        stem = tok.text.rstrip("'")
        primes = len(tok.text) - len(stem)
        v = self.names.get(stem)
        if v is None:
            raise self.error(f"undeclared identifier {stem!r}", tok)
        if primes:
            if not v.is_dep:
                raise self.error(f"cannot differentiate {stem!r}", tok)
            v = v.with_order(primes)
        return v

    # formula grammar

    def relation(self) -> Atom | bool:
        lhs = self.expr()
        tok = self.next()
        if tok.kind != "rel":
            raise self.error("expected a relation", tok)
        rhs = self.expr()
        return atom(lhs - rhs, Rel(tok.text))

    def conjunction(self) -> Formula:
        items = [self.relation()]
        while self.accept("and"):
            items.append(self.relation())
        return items[0] if len(items) == 1 else And(*items)

    def disjunction(self) -> Formula:
        items = [self.conjunction()]
        while self.accept("or"):
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(*items)


def name_table(funcs: tuple[str, ...] | list[str], params: tuple[str, ...] | list[str] = ()) -> dict[str, Var]:
    names = {TIME_NAME: Var.time()}
    names.update({f: Var.dep(i, 0, f) for i, f in enumerate(funcs)})
    names.update({p: Var.param(i, p) for i, p in enumerate(params)})
    return names


def parse_poly(text: str, names: dict[str, Var]) -> Poly:
    p = _Parser(text, names)
    out = p.expr()
    p.done()
    return out


def parse_formula(text: str, names: dict[str, Var]) -> Formula:
    """Parse relations joined by ``and``/``or`` (``and`` binds tighter)."""
    p = _Parser(text, names)
    out = p.disjunction()
    p.done()
    return out


@dataclass(frozen=True)
class SystemFile:
    """A parsed system file: the system plus the run options it carries."""

    system: DifferentialSystem
    prolong: int | None = None
    reduce: bool | None = None
    source: str = field(default="", compare=False)


_KEYS = ("funcs", "params", "order", "eq", "ineq", "prolong", "reduce")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _names_list(value: str, line: int, col: int) -> list[str]:
    out = [s.strip() for s in value.split(",") if s.strip()]
    for s in out:
        if not _IDENT.match(s) or s == "D":
            raise ParseError(f"invalid name {s!r}", line, col)
    return out


def _int_value(value: str, line: int, col: int, what: str) -> int:
    try:
        k = int(value)
    except ValueError:
        raise ParseError(f"{what} must be an integer", line, col) from None
    if k < 0:
        raise ParseError(f"{what} must be nonnegative", line, col)
    return k


def parse_system_file(text: str) -> SystemFile:
    funcs: list[str] = []
    params: list[str] = []
    order = prolong = reduce = None
    raw_eqs: list[tuple[str, int, int]] = []
    raw_ineqs: list[tuple[str, int, int]] = []
    first_decl: dict[str, int] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            raise ParseError("expected 'key: value'", ln, len(body) - len(body.lstrip()) + 1)
        key, value = body.split(":", 1)
        kcol = len(key) - len(key.lstrip()) + 1
        key = key.strip()
        vcol = len(body) - len(value) + 1 + (len(value) - len(value.lstrip()))
        value = value.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", ln, kcol)
        if key in ("funcs", "params", "order", "prolong", "reduce"):
            if key in first_decl:
                raise ParseError(f"duplicate {key!r} line", ln, kcol)
            first_decl[key] = ln
        if key == "funcs":
            funcs = _names_list(value, ln, vcol)
        elif key == "params":
            params = _names_list(value, ln, vcol)
        elif key == "order":
            order = _int_value(value, ln, vcol, "order")
        elif key == "prolong":
            prolong = _int_value(value, ln, vcol, "prolong")
        elif key == "reduce":
            if value not in ("on", "off"):
                raise ParseError("reduce must be 'on' or 'off'", ln, vcol)
            reduce = value == "on"
        elif key == "eq":
            raw_eqs.append((value, ln, vcol))
        else:
            raw_ineqs.append((value, ln, vcol))
    if not funcs:
        raise ParseError("missing 'funcs:' declaration", 1, 1)
    for n in (*funcs, *params):
        if n == TIME_NAME:
            raise ParseError("'t' is reserved for the independent variable", first_decl.get("funcs", 1), 1)
    if len(set(funcs) | set(params)) != len(funcs) + len(params):
        raise ParseError("function and parameter names must be distinct", first_decl.get("funcs", 1), 1)
    if not raw_eqs:
        raise ParseError("at least one 'eq:' line is required", 1, 1)
    names = name_table(funcs, params)
    eqs: list[Poly] = []
    for value, ln, col in raw_eqs:
        p = _Parser(value, names, ln, col)
        lhs = p.expr()
        if p.accept("="):
            lhs = lhs - p.expr()
        p.done()
        if not any(v.is_dep for v in lhs.variables()):
            raise ParseError("equation does not involve an unknown function", ln, col)
        eqs.append(lhs)
    ineqs: list[Atom] = []
    for value, ln, col in raw_ineqs:
        p = _Parser(value, names, ln, col)
        items = [p.relation()]
        while p.accept("and"):
            items.append(p.relation())
        p.done()
        for a in items:
            if a is True:
                continue
            if a is False:
                raise ParseError("inequality is never satisfied", ln, col)
            ineqs.append(a)
    top = max(max(q.jet_order() for q in eqs), max((a.poly.jet_order() for a in ineqs), default=0))
    if order is None:
        order = max(top, 1)
    elif top > order:
        raise ParseError(f"derivative of order {top} exceeds declared order {order}", first_decl["order"], 1)
    if order < 1:
        raise ParseError("order must be at least 1", first_decl.get("order", 1), 1)
    system = DifferentialSystem(tuple(funcs), order, tuple(eqs), tuple(ineqs), tuple(params))
    return SystemFile(system, prolong, reduce, text)


def parse_system(text: str) -> DifferentialSystem:
    return parse_system_file(text).system


def format_system(sys: DifferentialSystem, prolong: int | None = None, reduce: bool | None = None) -> str:
    """System file text that parses back to an equal system."""
    lines = [f"funcs: {', '.join(sys.funcs)}"]
    if sys.params:
        lines.append(f"params: {', '.join(sys.params)}")
    lines.append(f"order: {sys.order}")
    lines += [f"eq: {p}" for p in sys.equations]
    lines += [f"ineq: {a}" for a in sys.inequalities]
    if prolong is not None:
        lines.append(f"prolong: {prolong}")
    if reduce is not None:
        lines.append(f"reduce: {'on' if reduce else 'off'}")
    return "\n".join(lines) + "\n"
