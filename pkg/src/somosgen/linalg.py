"""Exact rational nullspaces by homomorphic imaging.

The matrix is scaled to integers, reduced modulo primes above 2^61 and put in
reduced row echelon form there.  Images whose pivot structure disagrees with
the best one (lower rank, or lexicographically later pivots) are discarded.
The surviving nullspace bases are combined by CRT and lifted with rational
reconstruction.  A lifted basis is only returned after it has been multiplied
back into the exact system and annihilates it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, lcm
from typing import Iterator, Sequence

import gmpy2
import numpy as np

__all__ = ["LinearSystem", "ReconstructionError", "nullspace", "rational_reconstruct", "primes_above"]

PRIME_FLOOR = 2 ** 61


class ReconstructionError(ArithmeticError):
    """Rational reconstruction did not certify within the prime budget."""


@dataclass
class LinearSystem:
    """Sparse exact matrix: one dict column -> value per row."""

    ncols: int
    rows: list[dict[int, object]] = field(default_factory=list)
    row_labels: list | None = None

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence]) -> LinearSystem:
        matrix = [list(r) for r in matrix]
        ncols = len(matrix[0]) if matrix else 0
        if any(len(r) != ncols for r in matrix):
            raise ValueError("ragged matrix")
        return cls(ncols, [{j: x for j, x in enumerate(r) if x} for r in matrix])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def to_dense(self) -> list[list]:
        return [[r.get(j, 0) for j in range(self.ncols)] for r in self.rows]

    def restrict(self, cols: Sequence[int]) -> LinearSystem:
        """Subsystem on the given columns (renumbered 0..len-1), zero rows dropped."""
        pos = {c: i for i, c in enumerate(cols)}
        rows, labels = [], []
        for k, r in enumerate(self.rows):
            nr = {pos[c]: x for c, x in r.items() if c in pos}
            if nr:
                rows.append(nr)
                if self.row_labels is not None:
                    labels.append(self.row_labels[k])
        return LinearSystem(len(cols), rows, labels if self.row_labels is not None else None)

    def apply(self, v: Sequence) -> list:
        """Exact product sys * v."""
        if len(v) != self.ncols:
            raise ValueError("vector length does not match column count")
        return [sum((x * v[j] for j, x in r.items() if v[j]), 0) for r in self.rows]

    def annihilates(self, v: Sequence) -> bool:
        den = reduce(lcm, (x.denominator for x in v if isinstance(x, Fraction)), 1)
        w = [int(x * den) for x in v]
        support = {j for j, x in enumerate(w) if x}
        for r in self.rows:
            if sum(x * w[j] for j, x in r.items() if j in support):
                return False
        return True


def primes_above(start: int = PRIME_FLOOR) -> Iterator[int]:
    p = int(gmpy2.next_prime(start))
    while True:
        yield p
        p = int(gmpy2.next_prime(p))


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """The unique n/d with |n|, d <= sqrt(m/2) and n = a*d mod m, if any."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _integer_rows(sys: LinearSystem):
    rows, scales = [], []
    for r in sys.rows:
        den = reduce(lcm, (x.denominator for x in r.values() if isinstance(x, Fraction)), 1)
        ir = {j: (x if den == 1 and not isinstance(x, Fraction) else int(x * den))
              for j, x in r.items() if x}
        if ir:
            rows.append(ir)
            scales.append(den)
    return rows, scales


def _rref_mod(rows, ncols: int, p: int):
    """Pivot columns and reduced pivot rows of the image mod p."""
    if not rows:
        return (), np.zeros((0, ncols), dtype=object)
    m = np.zeros((len(rows), ncols), dtype=object)
    for i, r in enumerate(rows):
        for j, x in r.items():
            m[i, j] = x % p
    nr = len(rows)
    pivots = []
    row = 0
    for j in range(ncols):
        if row >= nr:
            break
        colj = m[row:, j]
        nz = np.flatnonzero(colj != 0)
        if nz.size == 0:
            continue
        k = row + int(nz[0])
        if k != row:
            m[[row, k]] = m[[k, row]]
        inv = pow(int(m[row, j]), -1, p)
        m[row, j:] = (m[row, j:] * inv) % p
        others = np.flatnonzero(m[:, j] != 0)
        others = others[others != row]
        if others.size:
            factors = m[others, j].reshape(-1, 1)
            m[np.ix_(others, np.arange(j, ncols))] = (m[others, j:] - factors * m[row, j:]) % p
        pivots.append(j)
        row += 1
    return tuple(pivots), m[:row]


def _hadamard_bits(rows, ncols: int) -> int:
    """log2 of a bound on every minor of the integer matrix."""
    k = min(len(rows), ncols)
    # ||row|| <= sqrt(len) * max |entry|
    norms = sorted(max(x.bit_length() for x in r.values()) + (len(r).bit_length() + 1) // 2
                   for r in rows)
    return sum(norms[-k:]) if k else 0


def _certify(rows, v) -> bool:
    den = reduce(lcm, (x.denominator for x in v), 1)
    w = [int(x * den) for x in v]
    return all(not sum(x * w[j] for j, x in r.items() if w[j]) for r in rows)


def nullspace(sys: LinearSystem, max_primes: int | None = None) -> list[list[Fraction]]:
    """Exact basis of {v : sys * v = 0}.

    Basis vectors come from the reduced echelon form: one per free column f,
    with v[f] = 1 and zeros on the other free columns.  The default prime
    budget follows from the Hadamard bound, so reconstruction is guaranteed
    to succeed before it runs out; usually far fewer primes are needed.
    """
    n = sys.ncols
    rows, scales = _integer_rows(sys)
    if not rows:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    bad_scale = reduce(lcm, scales, 1)
    if max_primes is None:
        # entries of the reduced form are ratios of minors, |.| <= 2^h
        max_primes = (2 * _hadamard_bits(rows, n) + 2) // 61 + 2

    best = None          # (rank, pivots)
    residues = None      # CRT-accumulated entries, shape (rank, nfree)
    modulus = 1
    used = 0
    since_best = 0
    next_try = 1
    for p in primes_above():
        if used >= max_primes:
            break
        if bad_scale % p == 0:
            continue
        used += 1
        pivots, red = _rref_mod(rows, n, p)
        key = (-len(pivots), pivots)
        if best is not None and key > best:
            continue                      # unlucky prime
        free = [j for j in range(n) if j not in set(pivots)]
        image = red[:, free] if free else np.zeros((len(pivots), 0), dtype=object)
        if best is None or key < best:
            best = key
            residues = image.copy()
            modulus = p
            since_best = 1
            next_try = 1
        else:
            # CRT: x = residues mod modulus, x = image mod p
            t = ((image - residues) % p) * pow(modulus % p, -1, p) % p
            residues = residues + modulus * t
            modulus *= p
            since_best += 1
        if not free:
            return []
        if since_best < next_try and used < max_primes:
            continue
        next_try = max(next_try + 1, next_try * 3 // 2)
        basis = _lift(residues, modulus, best[1], free, n)
        if basis is not None and all(_certify(rows, v) for v in basis):
            return basis
    raise ReconstructionError(
        f"nullspace did not certify after {used} primes; raise max_primes"
    )


def _lift(residues, modulus, pivots, free, n):
    # entries mostly share one denominator: scale by the running one first
    # and only run the half-extended Euclid when that is not enough
    bound = isqrt(modulus // 2)
    den = 1
    basis = []
    for k, f in enumerate(free):
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            x = int(residues[i, k])
            if x == 0:
                continue
            y = -x * den % modulus
            if y > modulus // 2:
                y -= modulus
            if abs(y) <= bound:
                v[pc] = Fraction(y, den)
                continue
            q = rational_reconstruct(y, modulus)
            if q is None or q.denominator * den > bound:
                return None
            den *= q.denominator
            v[pc] = Fraction(q.numerator, den)
        basis.append(v)
    return basis
