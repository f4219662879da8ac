"""Exact arithmetic for breakpoints and slopes.

Breakpoints live in Z[1/(n_1...n_k)] and slopes in the multiplicative group
generated by n_1, ..., n_k.  Rationals are plain :class:`fractions.Fraction`
values: always reduced, arbitrary precision, immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Iterator, Optional

from .signature import GroupSignature

Rational = Fraction

EXPONENT_BOUND = 64

_RATIONAL_RE = re.compile(r"\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(r: Fraction) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class SlopeExponent:
    """The slope n_1^e_1 * ... * n_k^e_k, stored by its exponent vector."""

    exponents: tuple[int, ...]
    arities: tuple[int, ...]

    def __mul__(self, other: "SlopeExponent") -> "SlopeExponent":
        if self.arities != other.arities:
            raise ValueError("slope exponents over different signatures")
        return SlopeExponent(
            tuple(a + b for a, b in zip(self.exponents, other.exponents)), self.arities
        )

    def value(self) -> Fraction:
        out = Fraction(1)
        for n, e in zip(self.arities, self.exponents):
            out *= Fraction(n) ** e
        return out


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def _prime_basis(arities: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    primes = tuple(sorted({p for n in arities for p in _prime_factors(n)}))
    matrix = tuple(tuple(_valuation(n, p) for n in arities) for p in primes)
    return primes, matrix


def _solve_exact(matrix, target) -> Optional[list[Fraction]]:
    """Unique solution of matrix @ e = target when the columns are independent."""
    rows = [list(map(Fraction, row)) + [Fraction(t)] for row, t in zip(matrix, target)]
    ncols = len(matrix[0]) if matrix else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            return None
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    return [rows[i][-1] for i in range(ncols)]


@lru_cache(maxsize=None)
def _independent(arities: tuple[int, ...]) -> bool:
    _, matrix = _prime_basis(arities)
    # independence <=> the homogeneous system has only the zero solution
    return _solve_exact(matrix, [0] * len(matrix)) is not None


def _target_vector(r: Fraction, primes) -> Optional[list[int]]:
    num, den = r.numerator, r.denominator
    target = []
    for p in primes:
        a, b = _valuation(num, p), _valuation(den, p)
        num //= p**a
        den //= p**b
        target.append(a - b)
    if num != 1 or den != 1:
        return None
    return target


def _lex_solutions(matrix, target, k: int, bound: int) -> Iterator[tuple[int, ...]]:
    """Integer solutions with |e_j| <= bound, in lexicographic order."""

    def rec(j: int, rest: list[int], prefix: tuple[int, ...]):
        if j == k - 1:
            col = [row[j] for row in matrix]
            # solve col * e = rest for a single integer e
            e = None
            for c, t in zip(col, rest):
                if c == 0:
                    if t != 0:
                        return
                elif t % c:
                    return
                else:
                    cand = t // c
                    if e is None:
                        e = cand
                    elif e != cand:
                        return
            # every arity >= 2 has a prime factor, so the column is never zero
            if e is not None and abs(e) <= bound:
                yield prefix + (e,)
            return
        for e in range(-bound, bound + 1):
            yield from rec(j + 1, [t - row[j] * e for row, t in zip(matrix, rest)], prefix + (e,))

    yield from rec(0, list(target), ())


def slope_decompose(r: Fraction, sig: GroupSignature) -> Optional[SlopeExponent]:
    """Exponent vector e with prod n_j^e_j == r, or None when r is not a slope.

    For multiplicatively dependent arities such as (2, 4) the lexicographically
    smallest vector with every |e_j| <= 64 is returned.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError(f"slopes are positive, got {r}")
    arities = sig.arities
    primes, matrix = _prime_basis(arities)
    target = _target_vector(r, primes)
    if target is None:
        return None
    if _independent(arities):
        sol = _solve_exact(matrix, target)
        if sol is None or any(x.denominator != 1 for x in sol):
            return None
        return SlopeExponent(tuple(int(x) for x in sol), arities)
    for sol in _lex_solutions(matrix, target, len(arities), EXPONENT_BOUND):
        return SlopeExponent(sol, arities)
    return None


def monoid_split(r: Fraction, sig: GroupSignature) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Non-negative vectors (up, down) with r = n^up / n^down and small total size.

    Used where the lexicographic choice of :func:`slope_decompose` would build
    needlessly large balanced trees for dependent arities.
    """
    r = Fraction(r)
    arities = sig.arities
    primes, matrix = _prime_basis(arities)
    target = _target_vector(r, primes)
    if target is None:
        return None
    if _independent(arities):
        dec = slope_decompose(r, sig)
        if dec is None:
            return None
        e = dec.exponents
    else:
        best = None
        for sol in _lex_solutions(matrix, target, len(arities), 16):
            key = (sum(abs(x) for x in sol), sol)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        e = best[1]
    return tuple(max(x, 0) for x in e), tuple(max(-x, 0) for x in e)


@lru_cache(maxsize=None)
def _base_product(arities: tuple[int, ...]) -> int:
    return prod(arities)


def in_base_ring(r: Fraction, sig: GroupSignature) -> bool:
    """True iff the denominator of r divides a power of n_1 * ... * n_k."""
    den = Fraction(r).denominator
    base = _base_product(sig.arities)
    while den > 1:
        g = gcd(den, base)
        if g == 1:
            return False
        den //= g
    return True


def is_slope(r: Fraction, sig: GroupSignature) -> bool:
    r = Fraction(r)
    return r > 0 and slope_decompose(r, sig) is not None
