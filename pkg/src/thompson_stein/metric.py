"""Word-metric bounds over the finite generating set X, with a BFS oracle.

The lower bound rests on two facts: every generator has at most ``a`` leaves,
and one more letter multiplies the leaf count by at most B = n_k n_1^b.  So an
element of length m has L(x) <= a B^(m-1).  The upper bound is constructive:
the normal form is rewritten over X by conjugating with powers of (z_1)_0.
"""

from __future__ import annotations

import copy
import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from .diagrams import PLMap
from .minimizer import CanonicalElement, canonical_from_map
from .signature import GroupSignature
from .trees import Leaf, depth
from .words import (
    Generator,
    Word,
    evaluate,
    finite_generators,
    generator_map,
    normal_form,
    normalize,
    y,
    z,
)


@dataclass(frozen=True)
class MetricConstants:
    """Constants of the metric estimates for one signature.

    ``a_nominal`` and ``c_nominal`` are the nominal values n_k + n_1 and b + 2.
    Both can undercut a generator: in F(2,3) the generator (z_2)_2 has 6
    leaves and depth 5.  ``a`` and ``c`` are raised to cover every generator.
    """

    b: int
    B: int
    a: int
    c: int
    d: int
    a_nominal: int
    c_nominal: int
    upper_factor: int = 5

    @classmethod
    def for_signature(cls, sig: GroupSignature) -> "MetricConstants":
        sig.require_divisible()
        b = (sig.nk - 1) // (sig.n1 - 1)
        gens = [evaluate(Word((g,)), sig) for g in finite_generators(sig)]
        a_nominal = sig.nk + sig.n1
        c_nominal = b + 2
        a = max(a_nominal, 1 + max(g.leaf_count for g in gens))
        c = max(c_nominal, max(g.depth for g in gens))
        return cls(b=b, B=sig.nk * sig.n1**b, a=a, c=c, d=10, a_nominal=a_nominal, c_nominal=c_nominal)


@lru_cache(maxsize=None)
def constants(sig: GroupSignature) -> MetricConstants:
    return MetricConstants.for_signature(sig)


def lower_bound(x: CanonicalElement, consts: Optional[MetricConstants] = None) -> int:
    """Smallest n + 1 with a * B^n >= L(x); 0 for the identity."""
    if x.is_identity():
        return 0
    k = consts or constants(x.sig)
    n, reach = 0, k.a
    while reach < x.leaf_count:
        n += 1
        reach *= k.B
    return n + 1


def _conjugated(g: Generator, sig: GroupSignature) -> list[Generator]:
    """g written over X by conjugating with (z_1)_0, which shifts z indices by n_1 - 1 and y indices by 1."""
    top = sig.arity(g.j) - 1
    if g.i <= top:
        return [g]
    if g.family == "z":
        step = sig.n1 - 1
        t = top - ((top - g.i) % step)
        m = (g.i - t) // step
    else:
        t, m = top, g.i - top
    return [z(1, 0, -m), Generator(g.family, g.j, t, g.exp), z(1, 0, m)]


def to_finite_word(x: CanonicalElement) -> Word:
    """A word over X for x, from its normal form."""
    nf = normal_form(x)
    out: list[Generator] = []
    for g in nf.to_word():
        out += _conjugated(g, x.sig)
    return normalize(Word(tuple(out)))


# ------------------------------------------------------------------- BFS


@dataclass(frozen=True)
class BallEntry:
    map: PLMap
    length: int
    word: Word


class Ball:
    """Breadth-first ball around the identity in the Cayley graph over X."""

    def __init__(self, sig: GroupSignature):
        self.sig = sig
        self.letters = [g for base in finite_generators(sig) for g in (base, base.inverse())]
        self.maps = [generator_map(g, sig) for g in self.letters]
        ident = PLMap.identity()
        self.entries: dict[PLMap, BallEntry] = {ident: BallEntry(ident, 0, Word())}
        self.shells: list[list[PLMap]] = [[ident]]
        self._view = False

    @property
    def radius(self) -> int:
        return len(self.shells) - 1

    def grow(self, radius: int) -> "Ball":
        if self._view:
            raise ValueError("a truncated view of a ball cannot grow")
        while self.radius < radius:
            shell = []
            r = self.radius + 1
            for f in self.shells[-1]:
                w = self.entries[f].word
                for g, gm in zip(self.letters, self.maps):
                    h = f @ gm
                    if h not in self.entries:
                        self.entries[h] = BallEntry(h, r, Word(w.tokens + (g,)))
                        shell.append(h)
            self.shells.append(shell)
        return self

    def __iter__(self) -> Iterator[BallEntry]:
        return self.upto(self.radius)

    def upto(self, radius: int) -> Iterator[BallEntry]:
        """Entries of length at most ``radius``, shell by shell."""
        for shell in self.shells[: radius + 1]:
            for f in shell:
                yield self.entries[f]

    def view(self, radius: int) -> "Ball":
        """A read-only ball of the given radius sharing this ball's entries."""
        v = copy.copy(self)
        v.shells = self.shells[: radius + 1]
        v._view = True
        return v

    def __len__(self) -> int:
        return sum(len(shell) for shell in self.shells)

    def length(self, f: PLMap) -> Optional[int]:
        e = self.entries.get(f)
        return None if e is None or e.length > self.radius else e.length

    def element(self, entry: BallEntry) -> CanonicalElement:
        return canonical_from_map(entry.map, self.sig)


_BALLS: dict[GroupSignature, Ball] = {}


def ball(sig: GroupSignature, radius: int) -> Ball:
    b = _BALLS.get(sig)
    if b is None:
        b = _BALLS[sig] = Ball(sig)
    return b.grow(radius).view(radius)


def bfs_length(x: CanonicalElement, max_radius: int) -> Optional[int]:
    """Exact |x|_X when it is at most max_radius, else None."""
    b = _BALLS.get(x.sig)
    if b is None:
        b = _BALLS[x.sig] = Ball(x.sig)
    while x.map not in b.entries and b.radius < max_radius:
        b.grow(b.radius + 1)
    return b.view(max_radius).length(x.map)


# ------------------------------------------------------------ experiments


@dataclass(frozen=True)
class GrowthRow:
    n: int
    leaves: int
    lower_bound: int
    finite_word_length: int
    bfs_length: Optional[int]
    domain_n1_ary: bool
    range_balanced: bool


def _uniform(t, arity: int) -> bool:
    if isinstance(t, Leaf):
        return True
    return t.arity == arity and all(_uniform(c, arity) for c in t.children)


def _balanced(t, arity: int) -> bool:
    if not _uniform(t, arity):
        return False
    return t.leaves == arity ** depth(t)


def growth_experiment(sig: GroupSignature, j: int, n_max: int, bfs_radius: int = 0) -> list[GrowthRow]:
    """Rows for x = (y_j)_0^n, n = 1..n_max; BFS lengths only up to ``bfs_radius``."""
    if j < 2:
        raise ValueError("growth experiment needs a y family j >= 2")
    sig.require_divisible()
    rows = []
    for n in range(1, n_max + 1):
        x = evaluate(Word((y(j, 0, n),)), sig)
        length = bfs_length(x, bfs_radius) if n <= bfs_radius else None
        rows.append(
            GrowthRow(
                n=n,
                leaves=x.leaf_count,
                lower_bound=lower_bound(x),
                finite_word_length=to_finite_word(x).length,
                bfs_length=length,
                domain_n1_ary=_uniform(x.rep.domain, sig.n1),
                range_balanced=_balanced(x.rep.range, sig.arity(j)),
            )
        )
    return rows


def growth_table(rows: list[GrowthRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "leaves", "lower_bound", "finite_word_length", "bfs_length"])
    for r in rows:
        w.writerow([r.n, r.leaves, r.lower_bound, r.finite_word_length, "" if r.bfs_length is None else r.bfs_length])
    return buf.getvalue()


def leaf_growth_ok(x: CanonicalElement, consts: Optional[MetricConstants] = None) -> bool:
    """L(xg) <= B L(x) for every g in X and its inverse."""
    k = consts or constants(x.sig)
    for base in finite_generators(x.sig):
        for g in (base, base.inverse()):
            h = canonical_from_map(x.map @ generator_map(g, x.sig), x.sig)
            if h.leaf_count > k.B * x.leaf_count:
                return False
    return True


def depth_bound_check(
    x: CanonicalElement, length: int, c: Optional[int] = None, growth: bool = True
) -> bool:
    """D(x) <= c |x|_X, plus the one-letter leaf growth L(xg) <= B L(x).

    ``c`` defaults to the corrected constant; pass ``constants(sig).c_nominal``
    to test the nominal one.
    """
    k = constants(x.sig)
    c = k.c if c is None else c
    if x.depth > c * length:
        return False
    return leaf_growth_ok(x, k) if growth else True
