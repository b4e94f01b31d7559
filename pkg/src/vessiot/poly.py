"""Sparse multivariate polynomials with exact rational coefficients.

Variables are jet coordinates (the independent variable ``t`` and the
derivatives of the unknown functions) together with named parameters.  The
variable order is orderly::

    t < u_1 < ... < u_m < u_1' < ... < u_m' < u_1'' < ... < parameters

i.e. time first, then by derivative order, then by function index, and
parameters last.  Terms are compared degree-lexicographically on top of this
order: higher total degree wins, ties are broken by the exponent of the
greatest variable, then the next one, and so on.  The *leading term* of a
polynomial is its greatest term; canonical (primitive) polynomials have a
positive leading coefficient.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as igcd, isqrt, lcm as ilcm
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

TIME, DEP, PARAM = 0, 1, 2

Monomial = tuple  # tuple[tuple[Var, int], ...], sorted by variable
Scalar = Union[int, Fraction]


class Var(NamedTuple):
    """A jet coordinate or parameter.

    Tuple order is the variable order described in the module docstring.
    """

    rank: int
    order: int
    index: int
    name: str

    @classmethod
    def time(cls, name: str = "t") -> Var:
        return cls(TIME, 0, 0, name)

    @classmethod
    def dep(cls, index: int, order: int, name: str) -> Var:
        return cls(DEP, order, index, name)

    @classmethod
    def param(cls, index: int, name: str) -> Var:
        return cls(PARAM, 0, index, name)

    @property
    def is_time(self) -> bool:
        return self.rank == TIME

    @property
    def is_dep(self) -> bool:
        return self.rank == DEP

    @property
    def is_param(self) -> bool:
        return self.rank == PARAM

    @property
    def is_jet(self) -> bool:
        return self.rank != PARAM

    def derivative(self, k: int = 1) -> Var:
        if not self.is_dep:
            raise ValueError(f"{self} is not a dependent variable")
        return Var(DEP, self.order + k, self.index, self.name)

    def with_order(self, k: int) -> Var:
        return Var(DEP, k, self.index, self.name)

    def __str__(self) -> str:
        if self.rank != DEP or self.order == 0:
            return self.name
        if self.order <= 3:
            return self.name + "'" * self.order
        return f"D({self.name},{self.order})"

    def __repr__(self) -> str:
        return f"Var({self})"


def _mono_key(m: Monomial) -> tuple:
    return (sum(e for _, e in m), tuple(reversed(m)))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _to_fraction(c: Scalar) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class Poly:
    """Immutable polynomial ``sum(coeff * monomial)`` over the rationals.

    The zero polynomial has no terms; no zero coefficient is ever stored.
    """

    __slots__ = ("_terms", "_hash", "_vars")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = _to_fraction(c)
        self._terms = clean
        self._hash: int | None = None
        self._vars: frozenset[Var] | None = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> Poly:
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        p._vars = None
        return p

    @classmethod
    def const(cls, c: Scalar) -> Poly:
        c = _to_fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, v: Var, exp: int = 1) -> Poly:
        return cls._raw({((v, exp),): Fraction(1)} if exp else {(): Fraction(1)})

    @classmethod
    def coerce(cls, x: Poly | Scalar | Var) -> Poly:
        if isinstance(x, Poly):
            return x
        if isinstance(x, Var):
            return cls.var(x)
        return cls.const(x)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        """Constant term (the value of a constant polynomial)."""
        return self._terms.get((), Fraction(0))

    def variables(self) -> frozenset[Var]:
        if self._vars is None:
            self._vars = frozenset(v for m in self._terms for v, _ in m)
        return self._vars

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e for _, e in m) for m in self._terms)

    def degree_in(self, x: Var) -> int:
        if not self._terms:
            return -1
        return max((e for m in self._terms for v, e in m if v == x), default=0)

    def coeffs_in(self, x: Var) -> dict[int, Poly]:
        """Coefficients of ``self`` viewed as a univariate polynomial in ``x``."""
        parts: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            e = 0
            rest = []
            for v, k in m:
                if v == x:
                    e = k
                else:
                    rest.append((v, k))
            parts.setdefault(e, {})[tuple(rest)] = c
        return {e: Poly._raw(t) for e, t in parts.items()}

    def lead_coeff_in(self, x: Var) -> Poly:
        cs = self.coeffs_in(x)
        return cs[max(cs)]

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms from greatest to smallest under the term order."""
        return sorted(self._terms.items(), key=lambda mc: _mono_key(mc[0]), reverse=True)

    def leading_term(self) -> tuple[Monomial, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self._terms.items(), key=lambda mc: _mono_key(mc[0]))

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1] if self._terms else Fraction(0)

    def jet_order(self) -> int:
        """Highest derivative order of a dependent variable, -1 if none."""
        return max((v.order for v in self.variables() if v.is_dep), default=-1)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Poly | Scalar) -> Poly:
        other = Poly.coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        t = dict(self._terms)
        for m, c in other._terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Poly._raw(t)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Poly | Scalar) -> Poly:
        return self + (-Poly.coerce(other))

    def __rsub__(self, other: Poly | Scalar) -> Poly:
        return Poly.coerce(other) + (-self)

    def __mul__(self, other: Poly | Scalar) -> Poly:
        if not isinstance(other, Poly):
            c = _to_fraction(other)
            if not c:
                return ZERO
            return Poly._raw({m: v * c for m, v in self._terms.items()})
        if not self._terms or not other._terms:
            return ZERO
        t: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = t.get(m, 0) + c1 * c2
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        return Poly._raw(t)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> Poly:
        c = _to_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative exponent")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- calculus and substitution ----------------------------------------

    def diff(self, x: Var) -> Poly:
        t: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            for i, (v, e) in enumerate(m):
                if v == x:
                    nm = m[:i] + (((v, e - 1),) if e > 1 else ()) + m[i + 1:]
                    t[nm] = t.get(nm, 0) + c * e
                    break
        return Poly._raw({m: c for m, c in t.items() if c})

    def subs(self, bindings: Mapping[Var, Poly | Scalar]) -> Poly:
        """Simultaneous substitution of variables by polynomials or rationals."""
        if not bindings or not (self.variables() & bindings.keys()):
            return self
        vals = {v: Poly.coerce(b) for v, b in bindings.items()}
        powers: dict[tuple[Var, int], Poly] = {}
        out = ZERO
        for m, c in self._terms.items():
            keep = []
            factor = Poly.const(c)
            for v, e in m:
                if v in vals:
                    key = (v, e)
                    if key not in powers:
                        powers[key] = vals[v] ** e
                    factor = factor * powers[key]
                else:
                    keep.append((v, e))
            out = out + factor * Poly._raw({tuple(keep): Fraction(1)})
        return out

    def evaluate(self, point: Mapping[Var, Scalar]) -> Fraction:
        """Exact value at a point binding every variable of the polynomial."""
        total = Fraction(0)
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                try:
                    term *= _to_fraction(point[v]) ** e
                except KeyError:
                    raise KeyError(f"no value for variable {v}") from None
            total += term
        return total

    # -- printing ---------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


ZERO = Poly()
ONE = Poly.const(1)


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(m: Monomial) -> str:
    return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in m)


def format_poly(p: Poly) -> str:
    """Render in the text syntax accepted by :mod:`vessiot.parsing`."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _format_rational(a)
        elif a == 1:
            body = _format_monomial(m)
        else:
            body = f"{_format_rational(a)}*{_format_monomial(m)}"
        if i == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


# ---------------------------------------------------------------------------
# content, division, gcd


def rational_content(p: Poly) -> Fraction:
    """Positive rational ``c`` with ``p / c`` having coprime integer coefficients."""
    if p.is_zero():
        return Fraction(0)
    nums = [c.numerator for c in p.terms.values()]
    dens = [c.denominator for c in p.terms.values()]
    return Fraction(igcd(*nums), ilcm(*dens))


def canonicalize(p: Poly) -> tuple[Fraction, Poly]:
    """Split ``p`` into ``(content, primitive)``.

    The primitive part has coprime integer coefficients and a positive
    leading coefficient, and ``content * primitive == p``.  Zero maps to
    ``(0, 0)``.
    """
    if p.is_zero():
        return Fraction(0), ZERO
    c = rational_content(p)
    if p.leading_coefficient() < 0:
        c = -c
    if c == 1:
        return c, p
    return c, p * (1 / c)


def primitive(p: Poly) -> Poly:
    return canonicalize(p)[1]


def divide_exact(a: Poly, b: Poly) -> Poly | None:
    """Return ``q`` with ``a == q * b``, or ``None`` when ``b`` does not divide ``a``."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return ZERO
    if b.is_constant():
        return a * (1 / b.constant_value())
    if not b.variables() <= a.variables():
        return None
    lm_b, lc_b = b.leading_term()
    db = dict(lm_b)
    q: dict[Monomial, Fraction] = {}
    r = a
    while not r.is_zero():
        lm_r, lc_r = r.leading_term()
        dr = dict(lm_r)
        quo = []
        for v, e in db.items():
            k = dr.get(v, 0)
            if k < e:
                return None
        for v, k in dr.items():
            e = k - db.get(v, 0)
            if e:
                quo.append((v, e))
        mq = tuple(sorted(quo))
        cq = lc_r / lc_b
        q[mq] = q.get(mq, 0) + cq
        r = r - Poly._raw({mq: cq}) * b
    return Poly._raw({m: c for m, c in q.items() if c})


def _main_var(*ps: Poly) -> Var:
    return max(v for p in ps for v in p.variables())


def content_in(p: Poly, x: Var) -> Poly:
    """Canonical gcd of the coefficients of ``p`` as a polynomial in ``x``."""
    if p.is_zero():
        return ZERO
    coeffs = sorted(p.coeffs_in(x).values(), key=len)
    g = primitive(coeffs[0])
    for c in coeffs[1:]:
        if g.is_constant():
            return ONE
        g = gcd(g, c)
    return g


def _prem(a: Poly, b: Poly, x: Var) -> Poly:
    db = b.degree_in(x)
    lb = b.lead_coeff_in(x)
    r = a
    while not r.is_zero():
        dr = r.degree_in(x)
        if dr < db:
            break
        lr = r.lead_coeff_in(x)
        r = lb * r - lr * Poly.var(x, dr - db) * b
    return r


def gcd(a: Poly, b: Poly) -> Poly:
    """Canonical greatest common divisor (primitive, positive leading coefficient).

    Recursive primitive polynomial remainder sequences over the rationals.
    """
    if a.is_zero():
        return primitive(b)
    if b.is_zero():
        return primitive(a)
    if a.is_constant() or b.is_constant():
        return ONE
    a, b = primitive(a), primitive(b)
    if a == b:
        return a
    x = _main_var(a, b)
    if x not in a.variables():
        return gcd(a, content_in(b, x))
    if x not in b.variables():
        return gcd(content_in(a, x), b)
    ca, cb = content_in(a, x), content_in(b, x)
    pa = divide_exact(a, ca)
    pb = divide_exact(b, cb)
    g = gcd(ca, cb)
    if pa.degree_in(x) < pb.degree_in(x):
        pa, pb = pb, pa
    while not pb.is_zero() and pb.degree_in(x) > 0:
        r = _prem(pa, pb, x)
        pa, pb = pb, (r if r.is_zero() else primitive(divide_exact(r, content_in(r, x))))
    if not pb.is_zero():
        # pb is a nonzero polynomial free of x: the x-primitive parts are coprime
        return primitive(g)
    pa = divide_exact(pa, content_in(pa, x))
    return primitive(g * pa)


# ---------------------------------------------------------------------------
# factorization


def monomial_content(p: Poly) -> dict[Var, int]:
    """Largest monomial dividing every term of ``p``."""
    if p.is_zero():
        return {}
    items = iter(p.terms)
    mins = dict(next(items))
    for m in items:
        d = dict(m)
        for v in list(mins):
            e = d.get(v, 0)
            if e < mins[v]:
                if e:
                    mins[v] = e
                else:
                    del mins[v]
        if not mins:
            break
    return mins


def _yun(f: Poly, x: Var) -> list[tuple[Poly, int]]:
    """Square-free decomposition of ``f`` (primitive in ``x``) with respect to ``x``."""
    df = f.diff(x)
    a = gcd(f, df)
    b = divide_exact(f, a)
    c = divide_exact(df, a)
    d = c - b.diff(x)
    out = []
    i = 1
    while b.degree_in(x) > 0:
        a = gcd(b, d)
        b = divide_exact(b, a)
        c = divide_exact(d, a)
        d = c - b.diff(x)
        if a.degree_in(x) > 0:
            out.append((primitive(a), i))
        i += 1
    return out


def square_free(p: Poly) -> list[tuple[Poly, int]]:
    """Square-free factors of a primitive nonconstant polynomial (no content)."""
    if p.is_constant():
        return []
    x = _main_var(p)
    cont = content_in(p, x)
    prim = divide_exact(p, cont) if not cont.is_constant() else p
    return square_free(cont) + _yun(primitive(prim), x)


def _rational_roots(p: Poly, x: Var) -> list[Fraction]:
    cs = p.coeffs_in(x)
    n = max(cs)
    coeffs = [cs.get(i, ZERO).constant_value() for i in range(n + 1)]
    scale = ilcm(*(c.denominator for c in coeffs))
    ints = [int(c * scale) for c in coeffs]
    if n == 2:
        a, b, c = ints[2], ints[1], ints[0]
        disc = b * b - 4 * a * c
        if disc < 0:
            return []
        s = isqrt(disc)
        if s * s != disc:
            return []
        return sorted({Fraction(-b - s, 2 * a), Fraction(-b + s, 2 * a)})
    if n > 12 or abs(ints[0]) > 10**4 or abs(ints[-1]) > 10**4:
        return []
    roots = []
    c0 = ints[0]
    if c0 == 0:
        roots.append(Fraction(0))
    for num in _divisors(abs(c0)):
        for den in _divisors(abs(ints[-1])):
            for s in (1, -1):
                r = Fraction(s * num, den)
                if r not in roots and sum(ci * r**i for i, ci in enumerate(ints)) == 0:
                    roots.append(r)
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return []
    return [d for d in range(1, n + 1) if n % d == 0]


def _split_univariate(f: Poly) -> list[Poly]:
    """Split a square-free univariate polynomial into linear factors where possible."""
    (x,) = f.variables()
    if f.degree_in(x) <= 1:
        return [f]
    out = []
    rest = f
    for r in _rational_roots(f, x):
        lin = primitive(Poly.var(x) - r)
        q = divide_exact(rest, lin)
        if q is not None:
            out.append(lin)
            rest = q
    if not rest.is_constant():
        out.append(primitive(rest))
    return out


def _split_by_contents(p: Poly) -> list[Poly]:
    """Split ``p`` using its contents with respect to each variable."""
    stack = [primitive(p)]
    done = []
    while stack:
        q = stack.pop()
        for x in sorted(q.variables()):
            c = content_in(q, x)
            if not c.is_constant():
                stack.append(c)
                stack.append(primitive(divide_exact(q, c)))
                break
        else:
            done.append(q)
    return done


def factor_basic(p: Poly) -> tuple[Fraction, list[tuple[Poly, int]]]:
    """Partial factorization ``p == content * prod(f**k for f, k in factors)``.

    Guaranteed: monomial content is split into variables, the result is
    square-free decomposed, and univariate factors of degree at most two
    are split over the rationals.  Factors are canonical and sorted.
    """
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    content, prim = canonicalize(p)
    acc: dict[Poly, int] = {}
    for v, e in monomial_content(prim).items():
        acc[Poly.var(v)] = acc.get(Poly.var(v), 0) + e
        prim = divide_exact(prim, Poly.var(v, e))
    if not prim.is_constant():
        for part in _split_by_contents(prim):
            for f, k in square_free(part):
                pieces = _split_univariate(f) if len(f.variables()) == 1 else [f]
                for g in pieces:
                    g = primitive(g)
                    acc[g] = acc.get(g, 0) + k
    factors = sorted(acc.items(), key=lambda fk: (fk[0].degree(), _poly_key(fk[0])))
    # leading terms multiply under a monomial order, so the product of
    # canonical factors is the canonical primitive part
    check = Poly.const(content)
    for f, k in factors:
        check = check * f**k
    if check != p:
        raise ArithmeticError(f"factorization of {p} does not reconstruct it")
    return content, factors


def _poly_key(p: Poly) -> tuple:
    return tuple((_mono_key(m), c) for m, c in p.sorted_terms())


def poly_sort_key(p: Poly) -> tuple:
    """Deterministic total order key on polynomials (smaller polynomials first)."""
    return (p.degree(), len(p), _poly_key(p))


def is_positive_shape(p: Poly) -> bool:
    """Sum of even-power monomials with positive coefficients plus a positive constant."""
    if p.constant_value() <= 0:
        return False
    return all(c > 0 and all(e % 2 == 0 for _, e in m) for m, c in p.terms.items())


def definite_sign(p: Poly) -> int:
    """+1/-1 when the positivity shortcut fixes the sign of ``p``, else 0."""
    if p.is_constant():
        v = p.constant_value()
        return (v > 0) - (v < 0)
    if is_positive_shape(p):
        return 1
    if is_positive_shape(-p):
        return -1
    return 0


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Quotient ``num / den`` of polynomials in lowest terms.

    The denominator is primitive with a positive leading coefficient.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | Scalar, den: Poly | Scalar = 1, *, reduced: bool = False):
        num, den = Poly.coerce(num), Poly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            if num.is_zero():
                den = ONE
            else:
                g = gcd(num, den)
                if not g.is_constant():
                    num = divide_exact(num, g)
                    den = divide_exact(den, g)
            c, den = canonicalize(den)
            num = num * (1 / c)
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __add__(self, other: RatFunc) -> RatFunc:
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den, reduced=True)

    def __sub__(self, other: RatFunc) -> RatFunc:
        return self + (-other)

    def __mul__(self, other: RatFunc | Poly | Scalar) -> RatFunc:
        if not isinstance(other, RatFunc):
            other = RatFunc(Poly.coerce(other))
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: RatFunc | Poly | Scalar) -> RatFunc:
        if not isinstance(other, RatFunc):
            other = RatFunc(Poly.coerce(other))
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def evaluate(self, point: Mapping[Var, Scalar]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes")
        return self.num.evaluate(point) / d

    def __str__(self) -> str:
        if self.den == ONE:
            return format_poly(self.num)
        num = format_poly(self.num)
        if len(self.num) > 1:
            num = f"({num})"
        den = format_poly(self.den)
        if len(self.den) > 1 or len(self.den.variables()) > 1 or self.den.degree() > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def variables_of(polys: Iterable[Poly]) -> frozenset[Var]:
    out: set[Var] = set()
    for p in polys:
        out |= p.variables()
    return frozenset(out)


def iter_monomials(p: Poly) -> Iterator[Monomial]:
    return iter(p.terms)
