"""Polynomial relations by undetermined coefficients.

A generic polynomial P(x_0, ..., x_r) of bounded total degree is written
with unknown coefficients, the expressions (symbolic Binet forms, rational
functions, or plain sequence values) are plugged in, and the coefficient
matching conditions are solved as one exact linear system.

Which nullspace element to report is decided by a degree filtration: total
degree t = 0, 1, ..., d is tried in turn (and, for the Somos drivers, orders
2..max_r inside each t), and the first level with a usable relation wins.
Within a level, relations that really divide (non-constant denominator in the
solved form) are preferred to polynomial recurrences, then fewer terms, then
the graded-lex-smaller leading monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .binet import BinetWindow, binet_window, check_param, window_substitute
from .cfinite import CFiniteSequence, ExpPolyIndex, index_eval, subseq_window
from .exprparse import parse_poly
from .linalg import LinearSystem, nullspace
from .polyarith import MultiPoly, RationalFunction, content_primitive, format_poly, monomial_key

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int

__all__ = [
    "NotFound",
    "RelationAnsatz",
    "NonlinearRecurrence",
    "window_names",
    "enumerate_ansatz",
    "ansatz_size",
    "find_rel",
    "assemble_symbolic_system",
    "assemble_empirical_system",
    "solve_for_last",
    "find_somos_poly",
    "find_somos_exp",
    "find_somos",
    "find_empirical",
    "EMPIRICAL_MARGIN",
    "HELD_OUT",
]

EMPIRICAL_MARGIN = 10
HELD_OUT = 50
# f(m) has about m digits; beyond this the empirical backend refuses to start
MAX_EMPIRICAL_INDEX = 2 ** 24
ADVICE = "raise d and/or r"


@dataclass(frozen=True)
class NotFound:
    """Search came back empty (the FAIL outcome).  Falsy."""

    reason: str = ""

    def __bool__(self):
        return False

    def __str__(self):
        return f"FAIL ({self.reason})" if self.reason else "FAIL"


def window_names(r: int, symbol: str = "x", start: int = 0) -> tuple[str, ...]:
    return tuple(f"{symbol}{i}" for i in range(start, start + r + 1))


@dataclass(frozen=True)
class RelationAnsatz:
    variables: tuple[str, ...]
    degree: int
    linear_in_last: bool
    monomials: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return len(self.variables) - 1

    @property
    def size(self) -> int:
        return len(self.monomials)

    def columns_up_to(self, t: int) -> list[int]:
        return [i for i, e in enumerate(self.monomials) if sum(e) <= t]

    def polynomial(self, coeffs: Sequence) -> MultiPoly:
        return MultiPoly(self.variables, {e: c for e, c in zip(self.monomials, coeffs) if c})


def _compositions(nvars: int, maxdeg: int):
    if nvars == 0:
        yield ()
        return
    for k in range(maxdeg + 1):
        for rest in _compositions(nvars - 1, maxdeg - k):
            yield (k,) + rest


def enumerate_ansatz(r: int, d: int, linear_in_last: bool = False,
                     variables: Sequence[str] | None = None) -> RelationAnsatz:
    """All monomials of total degree <= d in r+1 variables, graded-lex ascending."""
    if r < 0 or d < 0:
        raise ValueError("need r >= 0 and d >= 0")
    variables = tuple(variables) if variables is not None else window_names(r)
    if len(variables) != r + 1:
        raise ValueError("need exactly r+1 variable names")
    monos = [e for e in _compositions(r + 1, d) if not linear_in_last or e[-1] <= 1]
    monos.sort(key=monomial_key)
    return RelationAnsatz(variables, d, linear_in_last, tuple(monos))


def ansatz_size(r: int, d: int, linear_in_last: bool = False) -> int:
    """Closed-form monomial count of :func:`enumerate_ansatz`."""
    if not linear_in_last:
        return comb(r + 1 + d, d)
    if r == 0:
        return 2 if d >= 1 else 1
    return comb(r + d, d) + (comb(r + d - 1, d - 1) if d >= 1 else 0)


def _columns_to_system(columns, ncols) -> LinearSystem:
    index: dict = {}
    rows: list[dict] = []
    for j, col in enumerate(columns):
        for key, val in col:
            i = index.get(key)
            if i is None:
                i = index[key] = len(rows)
                rows.append({})
            rows[i][j] = val
    labels = [None] * len(rows)
    for key, i in index.items():
        labels[i] = key
    return LinearSystem(ncols, rows, labels)


def assemble_symbolic_system(w: BinetWindow, ansatz: RelationAnsatz) -> LinearSystem:
    """Coefficient-matching system for plugging a Binet window into the ansatz.

    Column j is m_j(window) * (2 alpha - c)^(d - deg m_j) in u + v*alpha form;
    each Laurent monomial in the auxiliary symbols yields a u-row and a v-row.
    """
    if len(w.numerators) != ansatz.r + 1:
        raise ValueError(f"window has {len(w.numerators)} entries, ansatz needs {ansatz.r + 1}")
    columns = []
    for e in ansatz.monomials:
        expr = window_substitute(MultiPoly.monomial(ansatz.variables, e), w)
        pad = ansatz.degree - sum(e)
        for _ in range(pad):
            expr = expr * w.denominator
        col = [((m, "u"), k) for m, k in expr.u.terms.items()]
        col += [((m, "v"), k) for m, k in expr.v.terms.items()]
        columns.append(col)
    return _columns_to_system(columns, ansatz.size)


def _domain_start(f: CFiniteSequence, p: ExpPolyIndex) -> int:
    if f.reversible:
        return 1
    n = 1
    while index_eval(p, n) < f.offset:
        n += 1
    return n


def assemble_empirical_system(f: CFiniteSequence, p: ExpPolyIndex, ansatz: RelationAnsatz,
                              n_points: int | None = None, start: int | None = None) -> LinearSystem:
    """One row per window a(n), ..., a(n+r): the ansatz monomials evaluated there."""
    if n_points is None:
        n_points = ansatz.size + EMPIRICAL_MARGIN
    if n_points < 1:
        raise ValueError("need at least one data point")
    if start is None:
        start = _domain_start(f, p)
    r = ansatz.r
    values = [_big(v) for v in subseq_window(f, p, start, n_points - 1 + r)]
    rows = []
    for n in range(n_points):
        win = values[n:n + r + 1]
        cache = {(0,) * (r + 1): 1}
        row = {}
        for j, e in enumerate(ansatz.monomials):
            val = _mono_value(e, win, cache)
            if val:
                row[j] = val
        rows.append(row)
    return LinearSystem(ansatz.size, rows, [("n", start + n) for n in range(n_points)])


def _mono_value(e, win, cache):
    got = cache.get(e)
    if got is None:
        j = max(i for i, x in enumerate(e) if x)
        prev = list(e)
        prev[j] -= 1
        got = _mono_value(tuple(prev), win, cache) * win[j]
        cache[e] = got
    return got


# -- selection -------------------------------------------------------------


def _primitive(ansatz: RelationAnsatz, v) -> MultiPoly:
    return content_primitive(ansatz.polynomial(v))[1]


def solve_for_last(P: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Split P = D * x_r - N with N, D free of the last variable.

    D is normalised to a positive leading coefficient.
    """
    last = len(P.vars) - 1
    if P.degree_in(last) != 1 or P.min_degree_in(last) < 0:
        raise ValueError("annihilator must have degree exactly 1 in its last variable; "
                         "re-run with linear_in_last")
    rest = P.vars[:-1]
    groups = P.collect([P.vars[-1]])
    D = groups.get((1,), MultiPoly.zero(rest))
    N = -groups.get((0,), MultiPoly.zero(rest))
    if D.leading_coefficient() < 0:
        D, N = -D, -N
    return N, D


def _trim(P: MultiPoly) -> MultiPoly:
    """Drop leading window variables that P does not use (lowers the order)."""
    k = 0
    while k < len(P.vars) - 1 and not P.involves(k):
        k += 1
    if k == 0:
        return P
    names = window_names(len(P.vars) - 1 - k)
    return MultiPoly(names, {e[k:]: c for e, c in P.terms.items()})


def _candidate_key(P: MultiPoly, linear_in_last: bool):
    lead = max(P.terms, key=monomial_key)
    if linear_in_last:
        _, D = solve_for_last(P)
        return (D.is_constant(), len(P), monomial_key(lead))
    return (len(P), monomial_key(lead))


def _pick(ansatz: RelationAnsatz, basis, linear_in_last: bool,
          denominator_ok: Callable[[MultiPoly], bool] | None):
    best = None
    for v in basis:
        P = _primitive(ansatz, v)
        if linear_in_last:
            if not P.involves(len(P.vars) - 1):
                continue
            if denominator_ok is not None and not denominator_ok(solve_for_last(P)[1]):
                continue
        key = _candidate_key(P, linear_in_last)
        if best is None or key < best[0]:
            best = (key, P)
    return None if best is None else best[1]


def _search(levels, d: int, linear_in_last: bool):
    """Degree filtration over a list of (tag, ansatz, system, denominator check).

    Returns (P, tag, nullspace dimension, degree level) or None.
    """
    for t in range(d + 1):
        for tag, ansatz, system, dcheck in levels:
            cols = ansatz.columns_up_to(t)
            sub_ansatz = RelationAnsatz(ansatz.variables, t, ansatz.linear_in_last,
                                        tuple(ansatz.monomials[i] for i in cols))
            basis = nullspace(system.restrict(cols))
            if not basis:
                continue
            P = _pick(sub_ansatz, basis, linear_in_last, dcheck)
            if P is not None:
                return P, tag, len(basis), t
    return None


# -- relations among expressions -------------------------------------------


def find_rel(exprs: Sequence[RationalFunction | MultiPoly], d: int, linear_in_last: bool = False,
             symbol: str = "x") -> MultiPoly | NotFound:
    """Primitive integer polynomial P(x1, ..., xk) of degree <= d with P(exprs) = 0.

    With ``linear_in_last`` the relation must have degree one in xk.
    """
    exprs = [RationalFunction(e) if isinstance(e, MultiPoly) else e for e in exprs]
    if not exprs:
        raise ValueError("need at least one expression")
    k = len(exprs)
    names = window_names(k - 1, symbol, start=1)
    ansatz = enumerate_ansatz(k - 1, d, linear_in_last, names)
    # common multiplier prod den_i^d keeps every column polynomial
    columns = []
    num_pw = [[MultiPoly.constant(e.vars, 1)] for e in exprs]
    den_pw = [[MultiPoly.constant(e.vars, 1)] for e in exprs]
    for i, e in enumerate(exprs):
        for _ in range(d):
            num_pw[i].append(num_pw[i][-1] * e.num)
            den_pw[i].append(den_pw[i][-1] * e.den)
    for mono in ansatz.monomials:
        col = MultiPoly.constant(exprs[0].vars, 1)
        for i, x in enumerate(mono):
            col = col * num_pw[i][x] * den_pw[i][d - x]
        columns.append(list(col.terms.items()))
    system = _columns_to_system(columns, ansatz.size)

    def dcheck(D: MultiPoly) -> bool:
        sub = D.with_variables(names[:-1]) if D.vars != names[:-1] else D
        if not sub.vars:
            return not sub.is_zero()
        return not sub.substitute(dict(zip(sub.vars, exprs[:-1]))).is_zero()

    found = _search([(k, ansatz, system, dcheck)], d, linear_in_last)
    if found is None:
        return NotFound(f"no relation of degree <= {d}; increase d")
    return found[0]


# -- nonlinear recurrences ---------------------------------------------------


@dataclass
class NonlinearRecurrence:
    """Annihilator P(x_0..x_r) with P(a(n), ..., a(n+r)) = 0, plus solved form."""

    order: int
    annihilator: MultiPoly
    numerator: MultiPoly | None
    denominator: MultiPoly | None
    initial_values: tuple[int, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.initial_values = tuple(int(v) for v in self.initial_values)
        if self.annihilator.vars != window_names(self.order):
            raise ValueError("annihilator must use variables x0..x{order}")

    @classmethod
    def from_annihilator(cls, P: MultiPoly, initial_values: Sequence[int],
                         provenance: dict | None = None) -> NonlinearRecurrence:
        P = content_primitive(P)[1]
        r = len(P.vars) - 1
        N = D = None
        if P.degree_in(r) == 1 and P.min_degree_in(r) >= 0:
            N, D = solve_for_last(P)
        return cls(r, P, N, D, tuple(initial_values), dict(provenance or {}))

    @classmethod
    def from_solved(cls, numerator: MultiPoly | str, denominator: MultiPoly | str | int,
                    initial_values: Sequence[int], provenance: dict | None = None) -> NonlinearRecurrence:
        """a(n+r) = N / D with r = len(initial_values)."""
        r = len(initial_values)
        rest = window_names(r - 1)
        if isinstance(numerator, str):
            numerator = parse_poly(numerator, rest)
        if isinstance(denominator, (str, int)):
            denominator = parse_poly(str(denominator), rest)
        names = window_names(r)
        P = (denominator.with_variables(names) * MultiPoly.var(names, names[-1])
             - numerator.with_variables(names))
        return cls.from_annihilator(P, initial_values, provenance)

    @property
    def solvable(self) -> bool:
        return self.denominator is not None

    def next_term(self, window: Sequence):
        """(N, D) evaluated on the last r terms."""
        return self.numerator.eval(window), self.denominator.eval(window)

    def solved_text(self, name: str = "a") -> str:
        if not self.solvable:
            raise ValueError("no solved form")
        r = self.order
        labels = [f"{name}(n-{r - i})" for i in range(r)]
        num = format_poly(self.numerator, labels)
        if self.denominator.is_constant() and self.denominator.constant_term() == 1:
            return f"{name}(n) = {num}"
        den = format_poly(self.denominator, labels)
        return f"{name}(n) = ({num})/({den})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "annihilator": format_poly(self.annihilator),
            "solved_numerator": format_poly(self.numerator) if self.solvable else None,
            "solved_denominator": format_poly(self.denominator) if self.solvable else None,
            "initial_values": [int(v) for v in self.initial_values],
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, data: dict) -> NonlinearRecurrence:
        r = int(data["order"])
        names = window_names(r)
        if data.get("annihilator"):
            P = parse_poly(data["annihilator"], names)
        elif data.get("solved_numerator") is not None:
            return cls.from_solved(data["solved_numerator"], data.get("solved_denominator") or "1",
                                   data["initial_values"], data.get("provenance"))
        else:
            raise ValueError("recurrence JSON needs an annihilator or a solved form")
        rec = cls.from_annihilator(P, data["initial_values"], data.get("provenance"))
        if len(rec.initial_values) != r:
            raise ValueError(f"order {r} recurrence needs {r} initial values")
        return rec


def _symbolic_search(c: int, p: ExpPolyIndex, max_r: int, d: int, backend_tag: str):
    c = check_param(c)
    if max_r < 2:
        return NotFound(f"order {max_r} is too small; {ADVICE}")
    full = binet_window(c, p, max_r)
    levels = []
    for r in range(2, max_r + 1):
        w = full.prefix(r)
        ansatz = enumerate_ansatz(r, d, True)
        system = assemble_symbolic_system(w, ansatz)
        dcheck = (lambda w: (lambda D: not window_substitute(D, w).is_zero()))(w.prefix(r - 1))
        levels.append((r, ansatz, system, dcheck))
    found = _search(levels, d, True)
    if found is None:
        return NotFound(f"no recurrence of order <= {max_r} and degree <= {d}; {ADVICE}")
    P, r_found, dim, t = found
    P = _trim(P)
    order = len(P.vars) - 1
    certified = window_substitute(P, full.prefix(order)).is_zero()
    if not certified:  # pragma: no cover - nullspace vectors are exact
        return NotFound("symbolic certificate failed")
    f = CFiniteSequence.lucas_type(c)
    provenance = {
        "backend": "symbolic",
        "c": c,
        "sequence": f.to_json(),
        "index": p.to_json(),
        "index_text": str(p),
        "degree_bound": d,
        "max_order": max_r,
        "search_order": r_found,
        "degree": P.degree(),
        "nullspace_dim": dim,
        "valid_from": 1,
        "certified": True,
        "driver": backend_tag,
    }
    return NonlinearRecurrence.from_annihilator(P, subseq_window(f, p, 1, order - 1), provenance)


def find_somos_poly(c: int, p: ExpPolyIndex, max_r: int, d: int) -> NonlinearRecurrence | NotFound:
    """Recurrence linear in its last term for a(n) = f(p(n)), p a polynomial,
    f(n) = c f(n-1) - f(n-2), f(0) = 0, f(1) = 1."""
    if not p.is_polynomial:
        raise ValueError("find_somos_poly needs a polynomial index; use find_somos_exp")
    return _symbolic_search(c, p, max_r, d, "poly")


def find_somos_exp(c: int, e: int, max_r: int, d: int) -> NonlinearRecurrence | NotFound:
    """Same as :func:`find_somos_poly` for the subsequence f(e^n)."""
    if e < 2:
        raise ValueError("exponential base must be at least 2")
    return _symbolic_search(c, ExpPolyIndex.exponential(e), max_r, d, "exp")


def find_somos(c: int, p: ExpPolyIndex, max_r: int, d: int) -> NonlinearRecurrence | NotFound:
    """Dispatch on the shape of ``p`` (polynomial or containing b^n terms)."""
    return _symbolic_search(c, p, max_r, d, "poly" if p.is_polynomial else "exp")


def find_empirical(f: CFiniteSequence, p: ExpPolyIndex, max_r: int, d: int,
                   n_points: int | None = None, held_out: int = HELD_OUT,
                   linear_in_last: bool = True) -> NonlinearRecurrence | NotFound:
    """Data-driven search for any C-finite f.

    The relation is fitted on windows starting at n = 1 (or the first index in
    f's domain) and then has to vanish on ``held_out`` further windows.
    """
    if max_r < 1:
        raise ValueError("max_r must be positive")
    start = _domain_start(f, p)
    orders = range(min(2, max_r), max_r + 1)
    levels = []
    sizes = {}
    for r in orders:
        ansatz = enumerate_ansatz(r, d, linear_in_last)
        npts = n_points if n_points is not None else ansatz.size + EMPIRICAL_MARGIN
        last = index_eval(p, start + npts + held_out + r)
        if last > MAX_EMPIRICAL_INDEX:
            raise ValueError(
                f"empirical search would need f({last}); lower n_points/held_out/max_r "
                f"or use the symbolic backend"
            )
        sizes[r] = npts
        system = assemble_empirical_system(f, p, ansatz, npts, start)
        fit = subseq_window(f, p, start, npts - 1 + r)

        def dcheck(D, fit=fit, r=r, npts=npts):
            return any(D.eval(fit[n:n + r]) for n in range(npts))

        levels.append((r, ansatz, system, dcheck if linear_in_last else None))
    found = _search(levels, d, linear_in_last)
    if found is None:
        return NotFound(f"no relation of order <= {max_r} and degree <= {d}; {ADVICE}")
    P, r_found, dim, t = found
    P = _trim(P)
    order = len(P.vars) - 1
    last_n = sizes[r_found] + held_out
    values = subseq_window(f, p, start, last_n - 1 + order)
    for n in range(last_n):
        if P.eval(values[n:n + order + 1]):
            return NotFound(f"fitted relation fails on held-out window n = {start + n}")
    provenance = {
        "backend": "empirical",
        "sequence": f.to_json(),
        "index": p.to_json(),
        "index_text": str(p),
        "degree_bound": d,
        "max_order": max_r,
        "search_order": r_found,
        "degree": P.degree(),
        "nullspace_dim": dim,
        "n_points": sizes[r_found],
        "held_out_checked_to": start + last_n - 1,
        "valid_from": start,
        "certified": False,
    }
    return NonlinearRecurrence.from_annihilator(P, values[:order], provenance)
