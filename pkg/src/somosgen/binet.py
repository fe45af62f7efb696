"""Symbolic Binet forms for f(n) = c f(n-1) - f(n-2), f(0) = 0, f(1) = 1.

With alpha a root of alpha^2 - c alpha + 1 we have
f(m) = (alpha^m - alpha^-m) / (alpha - alpha^-1), and alpha - alpha^-1 = 2 alpha - c.
For an index p(n) = sum coef * n^a * b^n, alpha^p(n+j) factors into powers of
auxiliary symbols T_(i,b) = alpha^(n^i * b^n) and a constant power of alpha.
Elements of Z[T^+-1][alpha]/(alpha^2 - c alpha + 1) are stored as u + v*alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple

from .cfinite import CFiniteSequence, ExpPolyIndex, seq_term, subseq_window
from .polyarith import MultiPoly, format_poly

__all__ = [
    "AuxVar",
    "QuadRingExpr",
    "BinetWindow",
    "CheckResult",
    "check_param",
    "shift_index",
    "aux_vars",
    "alpha_power",
    "binet_window",
    "numeric_check",
    "format_window",
    "window_substitute",
]

_SHORT_NAMES = {(1, 1): "A", (2, 1): "B", (3, 1): "C", (0, 2): "E", (0, 3): "G"}


class AuxVar(NamedTuple):
    """alpha^(n^a * b^n); (a, b) = (0, 1) is alpha itself and never an AuxVar."""

    a: int
    b: int

    @property
    def name(self) -> str:
        return _SHORT_NAMES.get((self.a, self.b), f"T_{self.a}_{self.b}")

    @property
    def exponent_text(self) -> str:
        parts = []
        if self.a == 1:
            parts.append("n")
        elif self.a:
            parts.append(f"n^{self.a}")
        if self.b > 1:
            parts.append(f"{self.b}^n")
        return "*".join(parts)


def check_param(c: int) -> int:
    c = int(c)
    if abs(c) < 3:
        raise ValueError(f"c = {c}: the symbolic engine needs |c| >= 3 (distinct real roots)")
    return c


def shift_index(p: ExpPolyIndex, j: int) -> tuple[dict[AuxVar, int], int]:
    """Exponents with alpha^p(n+j) = prod AuxVar^e * alpha^e0."""
    if j < 0:
        raise ValueError("shift must be nonnegative")
    exps: dict[AuxVar, int] = {}
    e0 = 0
    for t in p.terms:
        scale = t.coef * t.b ** j
        for i in range(t.a + 1):
            k = scale * comb(t.a, i) * j ** (t.a - i)
            if not k:
                continue
            if (i, t.b) == (0, 1):
                e0 += k
            else:
                key = AuxVar(i, t.b)
                exps[key] = exps.get(key, 0) + k
    return {v: e for v, e in exps.items() if e}, e0


def aux_vars(p: ExpPolyIndex, r: int) -> tuple[AuxVar, ...]:
    seen = set()
    for j in range(r + 1):
        seen.update(shift_index(p, j)[0])
    return tuple(sorted(seen, key=lambda v: (v.b, v.a)))


class QuadRingExpr:
    """u + v*alpha with u, v Laurent polynomials in the auxiliary symbols."""

    __slots__ = ("c", "u", "v")

    def __init__(self, c: int, u: MultiPoly, v: MultiPoly):
        if u.vars != v.vars:
            raise ValueError("u and v must share variables")
        self.c = c
        self.u = u
        self.v = v

    @property
    def vars(self):
        return self.u.vars

    @classmethod
    def constant(cls, c, variables, k=1):
        return cls(c, MultiPoly.constant(variables, k), MultiPoly.zero(variables))

    @classmethod
    def alpha(cls, c, variables):
        return cls(c, MultiPoly.zero(variables), MultiPoly.constant(variables, 1))

    @classmethod
    def alpha_pow(cls, c, variables, m: int):
        """alpha^m = f(m) alpha - f(m-1), valid for every integer m."""
        f = CFiniteSequence.lucas_type(c)
        return cls(c, MultiPoly.constant(variables, -seq_term(f, m - 1)),
                   MultiPoly.constant(variables, seq_term(f, m)))

    def _same(self, other):
        if not isinstance(other, QuadRingExpr):
            return NotImplemented
        if other.c != self.c or other.vars != self.vars:
            raise ValueError("ring parameters differ")
        return other

    def __add__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return QuadRingExpr(self.c, self.u + o.u, self.v + o.v)

    def __sub__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return QuadRingExpr(self.c, self.u - o.u, self.v - o.v)

    def __neg__(self):
        return QuadRingExpr(self.c, -self.u, -self.v)

    def __mul__(self, other):
        if isinstance(other, (int, MultiPoly)):
            return QuadRingExpr(self.c, self.u * other, self.v * other)
        o = self._same(other)
        if o is NotImplemented:
            return o
        # alpha^2 = c alpha - 1
        vv = self.v * o.v
        return QuadRingExpr(self.c, self.u * o.u - vv, self.u * o.v + self.v * o.u + vv * self.c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("use alpha_power for inverses")
        out = QuadRingExpr.constant(self.c, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def conjugate(self) -> QuadRingExpr:
        """alpha -> alpha^-1 = c - alpha and every symbol inverted."""
        inv = lambda p: MultiPoly(p.vars, {tuple(-x for x in e): k for e, k in p.terms.items()})
        u, v = inv(self.u), inv(self.v)
        return QuadRingExpr(self.c, u + v * self.c, -v)

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def __eq__(self, other):
        if not isinstance(other, QuadRingExpr):
            return NotImplemented
        return self.c == other.c and self.u == other.u and self.v == other.v

    def __hash__(self):
        return hash((self.c, self.u, self.v))

    def __str__(self):
        parts = []
        if not self.u.is_zero():
            parts.append(f"({format_poly(self.u)})")
        if not self.v.is_zero():
            parts.append(f"({format_poly(self.v)})*alpha")
        return " + ".join(parts) or "0"

    __repr__ = __str__


def alpha_power(c: int, exps: dict[AuxVar, int], e0: int, sign: int = 1,
                variables: tuple[AuxVar, ...] | None = None) -> QuadRingExpr:
    """alpha^(sign * p(n+j)) in normal form, from the output of shift_index."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if variables is None:
        variables = tuple(sorted(exps, key=lambda v: (v.b, v.a)))
    names = tuple(v.name for v in variables)
    mono = [0] * len(variables)
    for v, e in exps.items():
        mono[variables.index(v)] = sign * e
    m = MultiPoly.monomial(names, mono)
    return QuadRingExpr.alpha_pow(c, names, sign * e0) * m


@dataclass(frozen=True)
class BinetWindow:
    c: int
    index: ExpPolyIndex
    variables: tuple[AuxVar, ...]
    numerators: tuple[QuadRingExpr, ...]
    denominator: QuadRingExpr

    @property
    def r(self) -> int:
        return len(self.numerators) - 1

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def prefix(self, r: int) -> BinetWindow:
        """The sub-window a(n), ..., a(n+r)."""
        if r > self.r:
            raise ValueError(f"window only reaches a(n+{self.r})")
        return BinetWindow(self.c, self.index, self.variables, self.numerators[: r + 1], self.denominator)


def window_substitute(poly: MultiPoly, w: BinetWindow) -> QuadRingExpr:
    """poly(a(n), ..., a(n+k)) * (2 alpha - c)^deg(poly), in normal form.

    The i-th variable of ``poly`` stands for a(n+i).  The result is zero iff
    poly annihilates the window identically.
    """
    if len(poly.vars) > len(w.numerators):
        raise ValueError("polynomial has more variables than the window has entries")
    names = w.names
    d = max(poly.degree(), 0)
    den_pows = [QuadRingExpr.constant(w.c, names)]
    for _ in range(d):
        den_pows.append(den_pows[-1] * w.denominator)
    cache: dict = {(0,) * len(poly.vars): QuadRingExpr.constant(w.c, names)}

    def mono(e):
        got = cache.get(e)
        if got is None:
            j = max(i for i, x in enumerate(e) if x)
            if e[j] < 0:
                raise ValueError("window substitution needs nonnegative exponents")
            prev = list(e)
            prev[j] -= 1
            got = mono(tuple(prev)) * w.numerators[j]
            cache[e] = got
        return got

    total = QuadRingExpr(w.c, MultiPoly.zero(names), MultiPoly.zero(names))
    for e, k in poly.terms.items():
        if isinstance(k, Fraction):
            raise ValueError("window substitution expects integer coefficients")
        total = total + mono(e) * den_pows[d - sum(e)] * k
    return total


def binet_window(c: int, p: ExpPolyIndex, r: int) -> BinetWindow:
    """Symbolic a(n), ..., a(n+r) as numerator / (2 alpha - c)."""
    c = check_param(c)
    if r < 0:
        raise ValueError("r must be nonnegative")
    variables = aux_vars(p, r)
    nums = []
    for j in range(r + 1):
        exps, e0 = shift_index(p, j)
        nums.append(alpha_power(c, exps, e0, 1, variables) - alpha_power(c, exps, e0, -1, variables))
    names = tuple(v.name for v in variables)
    den = QuadRingExpr(c, MultiPoly.constant(names, -c), MultiPoly.constant(names, 2))
    return BinetWindow(c, p, variables, tuple(nums), den)


# -- numeric bridge: arithmetic in Z[alpha]/(alpha^2 - c alpha + 1) on int pairs


def _qmul(x, y, c):
    u1, v1 = x
    u2, v2 = y
    vv = v1 * v2
    return (u1 * u2 - vv, u1 * v2 + v1 * u2 + c * vv)


def _qpow(m: int, c: int):
    base = (0, 1) if m >= 0 else (c, -1)
    m = abs(m)
    out = (1, 0)
    while m:
        if m & 1:
            out = _qmul(out, base, c)
        m >>= 1
        if m:
            base = _qmul(base, base, c)
    return out


def _eval_entry(expr: QuadRingExpr, variables, n: int):
    c = expr.c
    logs = [n ** v.a * v.b ** n for v in variables]
    acc_u, acc_v = 0, 0
    for part, shift in ((expr.u, 0), (expr.v, 1)):
        for e, k in part.terms.items():
            m = shift + sum(x * l for x, l in zip(e, logs))
            pu, pv = _qpow(m, c)
            acc_u += k * pu
            acc_v += k * pv
    return acc_u, acc_v


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    n: int | None = None
    j: int | None = None

    def __bool__(self):
        return self.ok


def numeric_check(w: BinetWindow, f: CFiniteSequence, p: ExpPolyIndex, n_max: int) -> CheckResult:
    """Compare the symbolic window with exact terms for 1 <= n <= n_max.

    Each numerator must equal a(n+j) * (2 alpha - c) in the quotient ring.
    """
    c = w.c
    for n in range(1, n_max + 1):
        vals = subseq_window(f, p, n, w.r)
        for j, (num, val) in enumerate(zip(w.numerators, vals)):
            if _eval_entry(num, w.variables, n) != (-c * val, 2 * val):
                return CheckResult(False, n, j)
    return CheckResult(True)


def format_window(w: BinetWindow) -> str:
    """Human-readable window, one line per entry, in A/B/E/alpha notation."""
    lines = [f"c = {w.c}, p(n) = {w.index}"]
    for v in w.variables:
        lines.append(f"  {v.name} := alpha^({v.exponent_text})")
    for j, num in enumerate(w.numerators):
        sign = "-" if w.c > 0 else "+"
        lines.append(f"a(n+{j}) = [{num}] / (2*alpha {sign} {abs(w.c)})")
    return "\n".join(lines)
