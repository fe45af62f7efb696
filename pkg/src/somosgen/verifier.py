"""Certification of nonlinear recurrences.

Four independent checks: exact annihilation on true windows, forward
iteration with an integrality test at every step, termwise agreement with a
target sequence, and a symbolic annihilation proof in the Binet ring.  Only
the last one proves anything for all n; reports carry ``certificate=True``
exactly in that case.  The fixed symbolic-c identity for f(2^n) is checked
separately by :func:`verify_symbolic_c`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .binet import binet_window, check_param, window_substitute
from .cfinite import CFiniteSequence, ExpPolyIndex, seq_term, subseq_window
from .polyarith import UniPoly, format_poly
from .relations import NonlinearRecurrence

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int

__all__ = [
    "VerificationReport",
    "verify_annihilation",
    "verify_integrality",
    "verify_agreement",
    "certify_symbolic",
    "verify_symbolic_c",
    "encore_sequence",
    "iterate",
    "DEFAULT_INTEGRALITY_TERMS",
    "DEFAULT_CHECK_TERMS",
]

DEFAULT_INTEGRALITY_TERMS = 300
DEFAULT_CHECK_TERMS = 30
WITNESS_COUNT = 8

# failure kinds
MISMATCH = "mismatch"
RESIDUAL = "nonzero-residual"
NON_INTEGER = "non-integer"
DIVISION_BY_ZERO = "division-by-zero"
DOMAIN = "out-of-domain"


@dataclass
class VerificationReport:
    mode: str
    n_checked: int
    status: str
    first_failure: dict | None = None
    witnesses: list[int] | None = None
    certificate: bool = False
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError("status is 'pass' or 'fail'")
        if self.status == "pass" and self.first_failure is not None:
            raise ValueError("a passing report has no failure")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"mode": self.mode, "n_checked": self.n_checked, "status": self.status,
               "certificate": self.certificate}
        if self.first_failure is not None:
            out["first_failure"] = self.first_failure
        if self.witnesses is not None:
            out["witnesses"] = [int(w) for w in self.witnesses]
        if self.details:
            out["details"] = self.details
        return out

    @classmethod
    def from_json(cls, data: dict) -> VerificationReport:
        return cls(data["mode"], int(data["n_checked"]), data["status"], data.get("first_failure"),
                   data.get("witnesses"), bool(data.get("certificate", False)), data.get("details", {}))

    def summary(self) -> str:
        line = f"{self.mode}: {self.status.upper()} (n <= {self.n_checked})"
        if self.certificate:
            line += " [certificate]"
        if self.first_failure:
            line += f" first failure {self.first_failure}"
        return line


def _fail(mode, n_checked, n, kind, **detail):
    return VerificationReport(mode, n_checked, "fail", dict(n=n, kind=kind, **detail))


def _int_eval(poly, values):
    # integer-only evaluation keeps gmpy2 values on the fast path
    total = 0
    for e, k in poly.terms.items():
        t = _big(k)
        for x, v in zip(e, values):
            if x:
                t *= v ** x
        total += t
    return total


def verify_annihilation(rec: NonlinearRecurrence, f: CFiniteSequence, p: ExpPolyIndex,
                        n_max: int = DEFAULT_CHECK_TERMS) -> VerificationReport:
    """P(a(n), ..., a(n+r)) == 0 exactly for the true terms, 1 <= n <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    mode = "annihilation"
    r = rec.order
    start = int(rec.provenance.get("valid_from", 1))
    try:
        values = [_big(v) for v in subseq_window(f, p, start, n_max - 1 + r)]
    except ValueError as exc:
        return _fail(mode, n_max, start, DOMAIN, detail=str(exc))
    for i in range(n_max):
        res = _int_eval(rec.annihilator, values[i:i + r + 1])
        if res:
            return _fail(mode, n_max, start + i, RESIDUAL, residual=str(int(res)))
    return VerificationReport(mode, n_max, "pass")


def iterate(rec: NonlinearRecurrence, n_max: int):
    """Yield (n, value) from the solved form; raises ArithmeticError-derived
    exceptions for a zero divisor or a non-integer term."""
    if not rec.solvable:
        raise ValueError("recurrence has no solved form")
    r = rec.order
    terms = [_big(v) for v in rec.initial_values]
    for i, v in enumerate(terms[:n_max]):
        yield i + 1, v
    for n in range(r + 1, n_max + 1):
        window = terms[-r:]
        den = _int_eval(rec.denominator, window)
        if den == 0:
            raise _DivisionByZero(n)
        num = _int_eval(rec.numerator, window)
        q, rem = divmod(num, den)
        if rem:
            raise _NonInteger(n, num, den)
        terms.append(q)
        if len(terms) > r:
            terms.pop(0)
        yield n, q


class _DivisionByZero(ZeroDivisionError):
    def __init__(self, n):
        super().__init__(f"denominator vanishes at n = {n}")
        self.n = n


class _NonInteger(ArithmeticError):
    def __init__(self, n, num, den):
        super().__init__(f"a({n}) is not an integer")
        self.n, self.num, self.den = n, num, den


def _ratio_text(num, den) -> str:
    from fractions import Fraction
    q = Fraction(int(num), int(den))
    text = f"{q.numerator}/{q.denominator}"
    return text if len(text) < 200 else f"<{len(text)}-char fraction>"


def verify_integrality(rec: NonlinearRecurrence, n_max: int = DEFAULT_INTEGRALITY_TERMS,
                       n_witnesses: int = WITNESS_COUNT) -> VerificationReport:
    """Iterate a(n) = N/D from the initial values; every term must be an integer."""
    mode = "integrality"
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    witnesses = []
    try:
        for n, v in iterate(rec, n_max):
            if len(witnesses) < n_witnesses:
                witnesses.append(int(v))
    except _DivisionByZero as exc:
        rep = _fail(mode, n_max, exc.n, DIVISION_BY_ZERO)
        rep.witnesses = witnesses
        return rep
    except _NonInteger as exc:
        rep = _fail(mode, n_max, exc.n, NON_INTEGER, value=_ratio_text(exc.num, exc.den))
        rep.witnesses = witnesses
        return rep
    return VerificationReport(mode, n_max, "pass", witnesses=witnesses)


def verify_agreement(rec: NonlinearRecurrence, f: CFiniteSequence, n_max: int = DEFAULT_CHECK_TERMS,
                     p: ExpPolyIndex | None = None) -> VerificationReport:
    """Iterated recurrence equals f(n) (or f(p(n))) for 1 <= n <= n_max."""
    mode = "agreement"
    try:
        for n, v in iterate(rec, n_max):
            target = seq_term(f, p(n) if p is not None else n)
            if v != target:
                return _fail(mode, n_max, n, MISMATCH, got=str(int(v)), expected=str(target))
    except _DivisionByZero as exc:
        return _fail(mode, n_max, exc.n, DIVISION_BY_ZERO)
    except _NonInteger as exc:
        return _fail(mode, n_max, exc.n, NON_INTEGER, value=_ratio_text(exc.num, exc.den))
    return VerificationReport(mode, n_max, "pass")


def certify_symbolic(rec: NonlinearRecurrence, c: int, p: ExpPolyIndex) -> VerificationReport:
    """Plug the Binet window into the annihilator; zero in u + v*alpha form
    is a proof that the relation holds for every n."""
    mode = "symbolic"
    c = check_param(c)
    w = binet_window(c, p, rec.order)
    residual = window_substitute(rec.annihilator, w)
    if residual.is_zero():
        return VerificationReport(mode, 1, "pass", certificate=True,
                                  details={"statement": "holds for all n"})
    part, poly = ("u", residual.u) if not residual.u.is_zero() else ("v", residual.v)
    e, k = poly.sorted_terms()[0]
    mono = format_poly(type(poly)(poly.vars, {e: k}))
    return _fail(mode, 1, None, RESIDUAL, component=part, monomial=mono,
                 terms=len(residual.u) + len(residual.v))


# -- symbolic c ---------------------------------------------------------------


def _doubling(fm: UniPoly, fm1: UniPoly, c: UniPoly):
    """From (f(m), f(m+1)) get (f(2m), f(2m+1)) for f(n) = c f(n-1) - f(n-2)."""
    f2m = fm * (fm1 * 2 - c * fm)
    f2m1 = fm1 * fm1 - fm * fm
    return f2m, f2m1


def encore_sequence(n_max: int) -> list[UniPoly]:
    """b(0..n_max) with b(n) = f(2^n) as polynomials in c, f(0)=0, f(1)=1."""
    c = UniPoly.x()
    fm, fm1 = UniPoly((1,)), c          # f(1), f(2)
    out = [fm]
    for _ in range(n_max):
        # f(2m) and f(2m+1) from f(m), f(m+1); we need f(2m), f(2m+1) at m = 2^k
        f2m, f2m1 = _doubling(fm, fm1, c)
        fm, fm1 = f2m, f2m1
        out.append(fm)
    return out


def verify_symbolic_c(n_max: int = 12) -> VerificationReport:
    """b(n) (2 + (c-2)(c+2) b(n-2)^2) == b(n-1) (4 + (c-2)(c+2) b(n-1)^2) in Z[c]."""
    mode = "symbolic-c"
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    b = encore_sequence(n_max)
    c = UniPoly.x()
    k = (c - 2) * (c + 2)
    if b[0] != UniPoly((1,)) or b[1] != c:
        return _fail(mode, n_max, 0, MISMATCH, detail="initial values are not 1, c")
    for n in range(2, n_max + 1):
        lhs = b[n] * (k * (b[n - 2] * b[n - 2]) + 2)
        rhs = b[n - 1] * (k * (b[n - 1] * b[n - 1]) + 4)
        if lhs != rhs:
            return _fail(mode, n_max, n, RESIDUAL, degree=(lhs - rhs).degree())
    return VerificationReport(mode, n_max, "pass", certificate=True,
                              details={"degrees": [p.degree() for p in b]})
