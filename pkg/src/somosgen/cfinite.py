"""C-finite sequences and exponential-polynomial index functions.

A C-finite sequence satisfies f(n) = c_1 f(n-1) + ... + c_d f(n-d) and is
fixed by d initial values f(s), ..., f(s+d-1).  Terms far out are computed by
binary powering of the companion matrix, so f(2^22) costs ~22 squarings of a
d x d matrix rather than four million additions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

try:
    import gmpy2

    _big = gmpy2.mpz
except ImportError:  # pragma: no cover
    _big = int

__all__ = [
    "CFiniteSequence",
    "IndexTerm",
    "ExpPolyIndex",
    "CompanionState",
    "seq_term",
    "index_eval",
    "subseq_term",
    "subseq_window",
]


@dataclass(frozen=True)
class CFiniteSequence:
    coefficients: tuple[int, ...]
    initial_values: tuple[int, ...]
    offset: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        object.__setattr__(self, "initial_values", tuple(int(v) for v in self.initial_values))
        if not self.coefficients:
            raise ValueError("order must be at least 1")
        if len(self.initial_values) != len(self.coefficients):
            raise ValueError(
                f"need exactly {len(self.coefficients)} initial values, got {len(self.initial_values)}"
            )
        if self.coefficients[-1] == 0:
            raise ValueError("last recurrence coefficient c_d must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @classmethod
    def lucas_type(cls, c: int) -> CFiniteSequence:
        """f(n) = c f(n-1) - f(n-2) with f(0) = 0, f(1) = 1."""
        return cls((c, -1), (0, 1), offset=0)

    @property
    def reversible(self) -> bool:
        return abs(self.coefficients[-1]) == 1

    def __getitem__(self, n: int) -> int:
        return seq_term(self, n)

    def terms(self, start: int, stop: int) -> list[int]:
        """f(start), ..., f(stop - 1), stepping forward after one jump."""
        if stop <= start:
            return []
        state = CompanionState.at(self, start)
        out = [state.value]
        for _ in range(stop - start - 1):
            state = state.step()
            out.append(state.value)
        return out

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coefficients": list(self.coefficients),
            "initial_values": list(self.initial_values),
            "offset": self.offset,
        }

    @classmethod
    def from_json(cls, data: dict) -> CFiniteSequence:
        seq = cls(tuple(data["coefficients"]), tuple(data["initial_values"]), int(data.get("offset", 1)))
        if "order" in data and int(data["order"]) != seq.order:
            raise ValueError("order does not match the number of coefficients")
        return seq

    def __str__(self):
        d = self.order
        rhs = ""
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            term = f"f(n-{i + 1})" if abs(c) == 1 else f"{abs(c)}*f(n-{i + 1})"
            if not rhs:
                rhs = ("-" if c < 0 else "") + term
            else:
                rhs += (" - " if c < 0 else " + ") + term
        rhs = rhs or "0"
        init = ", ".join(f"f({self.offset + i})={v}" for i, v in enumerate(self.initial_values))
        return f"f(n) = {rhs}; {init} (order {d})"


def _companion(coeffs: Sequence[int]) -> list[list[int]]:
    # maps (f(n), ..., f(n+d-1)) to (f(n+1), ..., f(n+d))
    d = len(coeffs)
    m = [[0] * d for _ in range(d)]
    for i in range(d - 1):
        m[i][i + 1] = 1
    for i in range(d):
        m[d - 1][i] = coeffs[d - 1 - i]
    return m


def _inverse_companion(coeffs: Sequence[int]) -> list[list[int]]:
    # f(n-1) = (f(n+d-1) - c_1 f(n+d-2) - ... - c_{d-1} f(n)) / c_d, with c_d = +-1
    d = len(coeffs)
    cd = coeffs[-1]
    m = [[0] * d for _ in range(d)]
    row0 = [0] * d
    row0[d - 1] = cd
    for i in range(1, d):
        row0[d - 1 - i] = -coeffs[i - 1] * cd
    m[0] = row0
    for i in range(1, d):
        m[i][i - 1] = 1
    return m


def _matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def _matvec(a, v):
    return [sum(r[t] * v[t] for t in range(len(v))) for r in a]


def _matpow_vec(m, k: int, v, modulus=None):
    m = [[_big(x) for x in row] for row in m]
    v = [_big(x) % modulus if modulus else _big(x) for x in v]
    while k:
        if k & 1:
            v = _matvec(m, v)
            if modulus:
                v = [x % modulus for x in v]
        k >>= 1
        if k:
            m = _matmul(m, m)
            if modulus:
                m = [[x % modulus for x in row] for row in m]
    return v


def _window_at(f: CFiniteSequence, n: int, modulus=None) -> list:
    """(f(n), ..., f(n+d-1))."""
    k = n - f.offset
    if k >= 0:
        return _matpow_vec(_companion(f.coefficients), k, f.initial_values, modulus)
    if not f.reversible:
        raise ValueError(
            f"f({n}) lies before the offset {f.offset}; backward extension needs |c_d| = 1"
        )
    return _matpow_vec(_inverse_companion(f.coefficients), -k, f.initial_values, modulus)


def seq_term(f: CFiniteSequence, n: int, modulus: int | None = None) -> int:
    """Exact f(n) (or f(n) mod ``modulus``) in O(d^3 log n) multiplications."""
    return int(_window_at(f, n, modulus)[0])


@dataclass(frozen=True)
class CompanionState:
    """Window of d consecutive terms starting at ``index``."""

    sequence: CFiniteSequence
    index: int
    window: tuple[int, ...] = field(repr=False)

    @classmethod
    def at(cls, f: CFiniteSequence, n: int) -> CompanionState:
        return cls(f, n, tuple(int(x) for x in _window_at(f, n)))

    @property
    def value(self) -> int:
        return self.window[0]

    def step(self) -> CompanionState:
        nxt = sum(c * x for c, x in zip(self.sequence.coefficients, reversed(self.window)))
        return CompanionState(self.sequence, self.index + 1, self.window[1:] + (nxt,))


@dataclass(frozen=True, order=True)
class IndexTerm:
    """coef * n^a * b^n"""

    a: int
    b: int
    coef: int

    def __call__(self, n: int) -> int:
        return self.coef * n ** self.a * self.b ** n


@dataclass(frozen=True)
class ExpPolyIndex:
    """p(n) = sum of coef * n^a * b^n with nonnegative integer coefficients."""

    terms: tuple[IndexTerm, ...]

    def __post_init__(self):
        merged: dict = {}
        for t in self.terms:
            if t.a < 0 or t.b < 1:
                raise ValueError(f"bad index term {t}: need a >= 0 and b >= 1")
            if t.coef < 0:
                raise ValueError("index coefficients must be nonnegative")
            if (t.a, t.b) in merged:
                raise ValueError(f"duplicate index term n^{t.a}*{t.b}^n")
            merged[(t.a, t.b)] = t.coef
        kept = tuple(sorted(IndexTerm(a, b, c) for (a, b), c in merged.items() if c))
        if not kept:
            raise ValueError("index function needs a term with positive coefficient")
        object.__setattr__(self, "terms", kept)

    @classmethod
    def of(cls, *triples: tuple[int, int, int]) -> ExpPolyIndex:
        """Build from (coef, a, b) triples."""
        return cls(tuple(IndexTerm(a, b, coef) for coef, a, b in triples))

    @classmethod
    def polynomial(cls, coeffs: dict[int, int]) -> ExpPolyIndex:
        return cls(tuple(IndexTerm(a, 1, c) for a, c in coeffs.items()))

    @classmethod
    def power(cls, a: int) -> ExpPolyIndex:
        return cls.of((1, a, 1))

    @classmethod
    def exponential(cls, b: int) -> ExpPolyIndex:
        return cls.of((1, 0, b))

    @property
    def is_polynomial(self) -> bool:
        return all(t.b == 1 for t in self.terms)

    @property
    def max_base(self) -> int:
        return max(t.b for t in self.terms)

    def __call__(self, n: int) -> int:
        return index_eval(self, n)

    def to_json(self) -> list:
        return [{"coef": t.coef, "a": t.a, "b": t.b} for t in self.terms]

    @classmethod
    def from_json(cls, data) -> ExpPolyIndex:
        return cls(tuple(IndexTerm(int(t["a"]), int(t["b"]), int(t["coef"])) for t in data))

    def __str__(self):
        parts = []
        for t in sorted(self.terms, key=lambda t: (t.b, t.a), reverse=True):
            factors = []
            if t.a == 1:
                factors.append("n")
            elif t.a:
                factors.append(f"n^{t.a}")
            if t.b > 1:
                factors.append(f"{t.b}^n")
            if not factors:
                parts.append(str(t.coef))
            elif t.coef == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(t.coef)] + factors))
        return " + ".join(parts)


def index_eval(p: ExpPolyIndex, n: int) -> int:
    if n < 1:
        raise ValueError("index functions are evaluated at n >= 1")
    return sum(t(n) for t in p.terms)


def subseq_term(f: CFiniteSequence, p: ExpPolyIndex, n: int) -> int:
    return seq_term(f, index_eval(p, n))


def subseq_window(f: CFiniteSequence, p: ExpPolyIndex, n: int, r: int) -> list[int]:
    """[a(n), ..., a(n+r)] with a(k) = f(p(k))."""
    return [subseq_term(f, p, n + j) for j in range(r + 1)]
