"""Exact sparse multivariate (Laurent) polynomials and rational functions.

Integers are Python ints and rationals are :class:`fractions.Fraction`; a
coefficient whose denominator is 1 is always stored as a plain int.  Terms are
kept in a dict keyed by dense exponent tuples over a declared variable tuple.

Monomial order is graded lexicographic with the *last* declared variable most
significant, so that ``x3^2 - x2^2 - x1^2`` and ``5*x0^2*x2 + ...`` print with
their natural leading terms first.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

__all__ = [
    "VariableMismatch",
    "MultiPoly",
    "RationalFunction",
    "UniPoly",
    "monomial_key",
    "poly_add",
    "poly_mul",
    "poly_substitute",
    "poly_collect",
    "poly_eval",
    "content_primitive",
]


class VariableMismatch(ValueError):
    pass


def _norm(q):
    if isinstance(q, Fraction):
        return q.numerator if q.denominator == 1 else q
    return int(q)


def monomial_key(exps: Sequence[int]) -> tuple:
    """Sort key realising graded-lex order (last variable most significant)."""
    return (sum(exps), tuple(reversed(exps)))


class MultiPoly:
    """Immutable sparse polynomial over a fixed tuple of variable names.

    Negative exponents are allowed (Laurent polynomials); consumers restrict
    them where it matters.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(variables)
        clean = {}
        if terms:
            n = len(self.vars)
            for e, c in terms.items():
                if c:
                    e = tuple(e)
                    if len(e) != n:
                        raise ValueError(f"exponent {e} does not match variables {self.vars}")
                    clean[e] = _norm(c)
        self.terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def zero(cls, variables):
        return cls(variables)

    @classmethod
    def constant(cls, variables, value):
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def var(cls, variables, name, power=1):
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = power
        return cls(variables, {tuple(e): 1})

    @classmethod
    def monomial(cls, variables, exps, coeff=1):
        return cls(variables, {tuple(exps): coeff})

    def _raw(self, terms):
        # trusted constructor: terms already clean
        p = object.__new__(MultiPoly)
        p.vars = self.vars
        p.terms = terms
        p._hash = None
        return p

    # basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name) -> int:
        i = self.vars.index(name) if isinstance(name, str) else name
        return max((e[i] for e in self.terms), default=-1)

    def min_degree_in(self, name) -> int:
        i = self.vars.index(name) if isinstance(name, str) else name
        return min((e[i] for e in self.terms), default=0)

    def involves(self, name) -> bool:
        i = self.vars.index(name) if isinstance(name, str) else name
        return any(e[i] for e in self.terms)

    def is_laurent(self) -> bool:
        return any(x < 0 for e in self.terms for x in e)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=monomial_key)
        return e, self.terms[e]

    def leading_coefficient(self):
        return self.leading_term()[1]

    def coefficients(self):
        return list(self.terms.values())

    # arithmetic

    def _check(self, other):
        if other.vars != self.vars:
            raise VariableMismatch(f"{self.vars} vs {other.vars}")

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) or (gmpy2 is not None and isinstance(other, type(gmpy2.mpz(0)))):
            return MultiPoly.constant(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _norm(s)
            else:
                out.pop(e, None)
        return self._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return self._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k):
        if not k:
            return self._raw({})
        return self._raw({e: _norm(c * k) for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return self._raw({e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            return self._raw({tuple(x * k for x in e): _norm(Fraction(1) / Fraction(c) ** -k)})
        result = MultiPoly.constant(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.vars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # structural operations

    def with_variables(self, variables: Sequence[str]) -> MultiPoly:
        """Re-express over a different variable tuple containing all used variables."""
        variables = tuple(variables)
        pos = []
        for i, v in enumerate(self.vars):
            if v in variables:
                pos.append(variables.index(v))
            else:
                if any(e[i] for e in self.terms):
                    raise VariableMismatch(f"variable {v} is used but not in {variables}")
                pos.append(None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, x in enumerate(e):
                if pos[i] is not None:
                    ne[pos[i]] = x
            out[tuple(ne)] = c
        return MultiPoly(variables, out)

    def rename(self, variables: Sequence[str]) -> MultiPoly:
        variables = tuple(variables)
        if len(variables) != len(self.vars):
            raise VariableMismatch("rename needs the same number of variables")
        return MultiPoly(variables, self.terms)

    def eval(self, point):
        """Exact value at ``point`` (mapping name -> number, or a sequence)."""
        if isinstance(point, Mapping):
            vals = [point[v] for v in self.vars]
        else:
            vals = list(point)
            if len(vals) != len(self.vars):
                raise VariableMismatch("point has the wrong length")
        total = 0
        cache: dict = {}
        for e, c in self.terms.items():
            t = c
            for i, x in enumerate(e):
                if x:
                    key = (i, x)
                    pw = cache.get(key)
                    if pw is None:
                        pw = vals[i] ** x if x > 0 else Fraction(1) / Fraction(vals[i]) ** -x
                        cache[key] = pw
                    t = t * pw
            total = total + t
        if isinstance(total, Fraction):
            return _norm(total)
        return total

    def substitute(self, assignment: Mapping[str, object]) -> RationalFunction:
        return poly_substitute(self, assignment)

    def collect(self, names) -> dict:
        return poly_collect(self, names)

    def content_primitive(self):
        return content_primitive(self)

    def to_text(self) -> str:
        return format_poly(self)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({self.vars!r}, {format_poly(self)!r})"


def _format_monomial(vars_, e) -> str:
    parts = []
    for v, x in zip(vars_, e):
        if x == 1:
            parts.append(v)
        elif x:
            parts.append(f"{v}^{x}")
    return "*".join(parts)


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_poly(p: MultiPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text: graded-lex descending, explicit ``*`` and ``^``."""
    if not p.terms:
        return "0"
    vars_ = tuple(names) if names is not None else p.vars
    out = []
    for e, c in p.sorted_terms():
        mono = _format_monomial(vars_, e)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def _integer_scale(coeffs: Iterable) -> int:
    return reduce(lcm, (c.denominator for c in coeffs if isinstance(c, Fraction)), 1)


def content_primitive(p: MultiPoly):
    """Split ``p`` as content * primitive with the primitive part integral,
    coprime and with positive leading coefficient."""
    if p.is_zero():
        raise ValueError("content of the zero polynomial is undefined")
    den = _integer_scale(p.terms.values())
    ints = {e: int(c * den) for e, c in p.terms.items()}
    g = reduce(gcd, (abs(c) for c in ints.values()))
    lead = max(ints, key=monomial_key)
    if ints[lead] < 0:
        g = -g
    prim = MultiPoly(p.vars, {e: c // g for e, c in ints.items()})
    return _norm(Fraction(g, den)), prim


def poly_add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    a._check(b)
    return a + b


def poly_mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    a._check(b)
    return a * b


def poly_eval(p: MultiPoly, point):
    return p.eval(point)


def poly_collect(p: MultiPoly, names) -> dict:
    """Group ``p`` by monomials in ``names``.

    Returns a dict mapping exponent tuples (ordered as ``names``) to
    coefficient polynomials over the remaining variables.
    """
    names = tuple(names)
    for v in names:
        if v not in p.vars:
            raise VariableMismatch(f"{v} not among {p.vars}")
    sel = [p.vars.index(v) for v in names]
    rest = [i for i in range(len(p.vars)) if i not in sel]
    rest_vars = tuple(p.vars[i] for i in rest)
    groups: dict = {}
    for e, c in p.terms.items():
        key = tuple(e[i] for i in sel)
        groups.setdefault(key, {})[tuple(e[i] for i in rest)] = c
    return {k: MultiPoly(rest_vars, t) for k, t in groups.items()}


class RationalFunction:
    """Quotient num/den of polynomials over the same variables.

    Canonical form only clears content: both parts get integer coefficients
    with overall gcd 1 and the denominator gets a positive leading
    coefficient.  No polynomial gcd is cancelled.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.constant(num.vars, 1)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        coeffs = list(num.terms.values()) + list(den.terms.values())
        s = _integer_scale(coeffs)
        g = reduce(gcd, (abs(int(c * s)) for c in coeffs))
        if den.leading_coefficient() < 0:
            g = -g
        k = Fraction(s, g)
        self.num = num.scale(k)
        self.den = den.scale(k)

    @property
    def vars(self):
        return self.num.vars

    @classmethod
    def from_poly(cls, p: MultiPoly):
        return cls(p)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def to_poly(self) -> MultiPoly:
        if not self.den.is_constant():
            raise ValueError("not a polynomial")
        return self.num.scale(Fraction(1) / Fraction(self.den.constant_term()))

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction(MultiPoly.constant(self.vars, other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k >= 0:
            return RationalFunction(self.num ** k, self.den ** k)
        if self.num.is_zero():
            raise ZeroDivisionError("zero to a negative power")
        return RationalFunction(self.den ** -k, self.num ** -k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == MultiPoly.constant(self.vars, 1):
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def poly_substitute(p: MultiPoly, assignment: Mapping[str, object]) -> RationalFunction:
    """Compose ``p`` with rational functions.

    Uses the single common denominator prod(den_v^maxexp_v * num_v^-minexp_v)
    so no term-by-term denominator products build up.
    """
    missing = [v for v in p.vars if v not in assignment]
    if missing:
        raise KeyError(f"unassigned variables: {missing}")
    vals = {}
    target = None
    for v in p.vars:
        a = assignment[v]
        if isinstance(a, MultiPoly):
            a = RationalFunction(a)
        elif not isinstance(a, RationalFunction):
            raise TypeError("assignment values must be MultiPoly or RationalFunction")
        if target is None:
            target = a.vars
        elif a.vars != target:
            raise VariableMismatch("assigned expressions disagree on variables")
        vals[v] = a
    if target is None:
        raise ValueError("cannot substitute into a polynomial with no variables")
    if p.is_zero():
        return RationalFunction(MultiPoly.zero(target))
    hi = [max(0, p.degree_in(i)) for i in range(len(p.vars))]
    lo = [min(0, p.min_degree_in(i)) for i in range(len(p.vars))]
    for i, v in enumerate(p.vars):
        if lo[i] < 0 and vals[v].num.is_zero():
            raise ZeroDivisionError(f"negative power of {v}, which is assigned 0")
    num_pw: dict = {}
    den_pw: dict = {}

    def power(cache, i, poly, k):
        key = (i, k)
        if key not in cache:
            cache[key] = poly ** k
        return cache[key]

    total = MultiPoly.zero(target)
    for e, c in p.terms.items():
        t = MultiPoly.constant(target, c)
        for i, v in enumerate(p.vars):
            a = vals[v]
            kn = e[i] - lo[i]
            kd = hi[i] - e[i]
            if kn:
                t = t * power(num_pw, i, a.num, kn)
            if kd:
                t = t * power(den_pw, i, a.den, kd)
        total = total + t
    den = MultiPoly.constant(target, 1)
    for i, v in enumerate(p.vars):
        a = vals[v]
        if hi[i]:
            den = den * power(den_pw, i, a.den, hi[i])
        if lo[i]:
            den = den * power(num_pw, i, a.num, -lo[i])
    if den.is_zero():
        raise ZeroDivisionError("substitution produced a zero denominator")
    return RationalFunction(total, den)


# -- dense univariate integer polynomials -----------------------------------


def _bigint(x):
    return gmpy2.mpz(x) if gmpy2 is not None else int(x)


def _pack(coeffs, k):
    # sum c_i * 2^(k*i), divide and conquer so shifts stay balanced
    n = len(coeffs)
    if n <= 16:
        acc = _bigint(0)
        for c in reversed(coeffs):
            acc = (acc << k) + c
        return acc
    h = n // 2
    return _pack(coeffs[:h], k) + (_pack(coeffs[h:], k) << (k * h))


def _unpack(value, k, n):
    # balanced digits in base 2^k; requires |c_i| < 2^(k-1)
    half = 1 << (k - 1)
    bias = half * (((1 << (k * n)) - 1) // ((1 << k) - 1))
    v = int(value + bias)
    nbytes = k // 8
    raw = v.to_bytes(nbytes * n, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(n)]


class UniPoly:
    """Dense polynomial in one indeterminate with integer coefficients.

    Multiplication goes through Kronecker substitution so that a single big
    integer product (GMP when available) does the work.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def x(cls):
        return cls((0, 1))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def _c(self, other):
        if isinstance(other, UniPoly):
            return other
        if isinstance(other, int):
            return UniPoly((other,))
        return NotImplemented

    def __add__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return UniPoly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return UniPoly(c * other for c in self.coeffs)
        o = self._c(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return UniPoly()
        if min(len(a), len(b)) < 8:
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return UniPoly(out)
        ba = max(abs(c) for c in a).bit_length()
        bb = max(abs(c) for c in b).bit_length()
        k = ba + bb + min(len(a), len(b)).bit_length() + 2
        k = (k + 7) // 8 * 8
        prod = _pack(a, k) * _pack(b, k)
        return UniPoly(_unpack(prod, k, len(a) + len(b) - 1))

    __rmul__ = __mul__

    def shift(self, k: int = 1):
        """Multiply by the indeterminate to the k-th power."""
        return UniPoly((0,) * k + self.coeffs) if self.coeffs else self

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        o = self._c(other)
        if o is NotImplemented:
            return o
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.degree() > 8:
            return f"UniPoly(degree={self.degree()})"
        return f"UniPoly({list(self.coeffs)})"
