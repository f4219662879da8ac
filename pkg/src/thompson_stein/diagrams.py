"""Tree-pair diagrams, exact piecewise-linear maps, and the passage between them.

A diagram ``(domain, range)`` sends leaf interval i of the domain tree
linearly onto leaf interval i of the range tree.  Products follow map
composition: ``compose(x, y)`` is x after y.  Equality of group elements is
decided on canonical :class:`PLMap` values.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Optional, Sequence

from .rationals import format_rational, in_base_ring, monoid_split, parse_rational, slope_decompose
from .signature import GroupSignature
from .trees import (
    LEAF,
    Caret,
    Leaf,
    Tree,
    arities_used,
    balanced_tree,
    cut_points,
    format_tree,
    graft,
    parse_tree,
    trees_equivalent,
    valences,
)

ZERO, ONE = Fraction(0), Fraction(1)


class NotInGroup(ValueError):
    """The map has a breakpoint or slope outside F(n_1, ..., n_k)."""


# ------------------------------------------------------------------ PL maps


@dataclass(frozen=True)
class PLMap:
    """Increasing PL homeomorphism of [0, 1] given by its breakpoints.

    ``xs`` and ``ys`` both run from 0 to 1, strictly increasing.  Instances
    built through :meth:`from_points` are canonical: no breakpoint joins two
    segments of equal slope.
    """

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    @classmethod
    def from_points(cls, points: Iterable[tuple[Fraction, Fraction]]) -> "PLMap":
        pts = [(Fraction(x), Fraction(y)) for x, y in points]
        if len(pts) < 2 or pts[0] != (ZERO, ZERO) or pts[-1] != (ONE, ONE):
            raise ValueError("a PL map must start at (0,0) and end at (1,1)")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not (x1 > x0 and y1 > y0):
                raise ValueError("breakpoints must be strictly increasing in both coordinates")
        keep = [pts[0]]
        for i in range(1, len(pts) - 1):
            (xa, ya), (xb, yb), (xc, yc) = keep[-1], pts[i], pts[i + 1]
            if (yb - ya) * (xc - xb) != (yc - yb) * (xb - xa):
                keep.append(pts[i])
        keep.append(pts[-1])
        return cls(tuple(x for x, _ in keep), tuple(y for _, y in keep))

    @classmethod
    def identity(cls) -> "PLMap":
        return cls((ZERO, ONE), (ZERO, ONE))

    @property
    def points(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.ys))

    def is_identity(self) -> bool:
        return len(self.xs) == 2

    def slopes(self) -> list[Fraction]:
        return [(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:])]

    def __call__(self, x: Fraction) -> Fraction:
        return _evaluate(self.xs, self.ys, Fraction(x))

    def inverse(self) -> "PLMap":
        return PLMap(self.ys, self.xs)

    def __matmul__(self, other: "PLMap") -> "PLMap":
        return compose_maps(self, other)

    def check(self, sig: GroupSignature) -> None:
        """Raise :class:`NotInGroup` unless the map belongs to F(sig)."""
        for v in self.xs + self.ys:
            if not in_base_ring(v, sig):
                raise NotInGroup(f"breakpoint coordinate {format_rational(v)} not in Z[1/{prod(sig.arities)}]")
        for s in self.slopes():
            if slope_decompose(s, sig) is None:
                raise NotInGroup(f"slope {format_rational(s)} not in <{','.join(map(str, sig.arities))}>")

    def in_group(self, sig: GroupSignature) -> bool:
        try:
            self.check(sig)
        except NotInGroup:
            return False
        return True

    def __str__(self) -> str:
        return format_map(self)


def _evaluate(xs, ys, x: Fraction) -> Fraction:
    i = bisect_right(xs, x) - 1
    if i >= len(xs) - 1:
        i = len(xs) - 2
    if i < 0:
        raise ValueError(f"{x} outside [0, 1]")
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def _walk(xs, ys, queries: Sequence[Fraction]) -> list[Fraction]:
    """Evaluate at increasing queries in one pass."""
    out = []
    i = 0
    last = len(xs) - 2
    for q in queries:
        while i < last and xs[i + 1] <= q:
            i += 1
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        out.append(y0 + (q - x0) * (y1 - y0) / (x1 - x0))
    return out


def compose_maps(f: PLMap, g: PLMap) -> PLMap:
    """f after g."""
    mids = sorted(set(g.ys) | set(f.xs))
    xs = _walk(g.ys, g.xs, mids)
    ys = _walk(f.xs, f.ys, mids)
    return PLMap.from_points(zip(xs, ys))


def format_map(f: PLMap) -> str:
    return ";".join(f"{format_rational(x)},{format_rational(y)}" for x, y in zip(f.xs, f.ys))


def parse_map(text: str) -> PLMap:
    pts = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'x,y' in PL map text, got {chunk!r}")
        pts.append((parse_rational(parts[0]), parse_rational(parts[1])))
    return PLMap.from_points(pts)


# ------------------------------------------------------------------ diagrams


@dataclass(frozen=True)
class TreePair:
    domain: Tree
    range: Tree

    def __post_init__(self):
        if self.domain.leaves != self.range.leaves:
            raise ValueError(
                f"domain has {self.domain.leaves} leaves but range has {self.range.leaves}"
            )

    @property
    def leaves(self) -> int:
        return self.domain.leaves

    def __str__(self) -> str:
        return format_diagram(self)


IDENTITY = TreePair(LEAF, LEAF)


def format_diagram(d: TreePair) -> str:
    return f"{format_tree(d.domain)} | {format_tree(d.range)}"


def parse_diagram(text: str, sig: Optional[GroupSignature] = None) -> TreePair:
    if text.count("|") != 1:
        raise ValueError("diagram text needs exactly one '|' between domain and range")
    left, right = text.split("|")
    return TreePair(parse_tree(left, sig), parse_tree(right, sig))


def to_map(d: TreePair) -> PLMap:
    xs = (ZERO,) + cut_points(d.domain) + (ONE,)
    ys = (ZERO,) + cut_points(d.range) + (ONE,)
    return PLMap.from_points(zip(xs, ys))


def invert(x: TreePair) -> TreePair:
    return TreePair(x.range, x.domain)


def is_identity(x: TreePair) -> bool:
    return trees_equivalent(x.domain, x.range)


def _signature_of(*trees: Tree) -> Optional[GroupSignature]:
    used = set()
    for t in trees:
        used |= arities_used(t)
    return GroupSignature(used) if used else None


def _common(t: Tree, s: Tree) -> tuple[list[Tree], list[Tree], Tree]:
    """Grafts for each leaf of t and of s making the two grafted trees equivalent."""
    if isinstance(t, Leaf):
        return [s], [LEAF] * s.leaves, s
    if isinstance(s, Leaf):
        return [LEAF] * t.leaves, [t], t
    if t.arity == s.arity:
        gt: list[Tree] = []
        gs: list[Tree] = []
        wit = []
        for a, b in zip(t.children, s.children):
            x, y, w = _common(a, b)
            gt += x
            gs += y
            wit.append(w)
        return gt, gs, Caret(t.arity, tuple(wit))
    sig = _signature_of(t, s)
    vt, vs = valences(t, sig), valences(s, sig)
    top = tuple(max(col) for col in zip(*(vt + vs)))
    fill = lambda v: balanced_tree(tuple(m - x for m, x in zip(top, v)), sig)  # noqa: E731
    return [fill(v) for v in vt], [fill(v) for v in vs], balanced_tree(top, sig)


def common_subdivision(t: Tree, s: Tree) -> tuple[Tree, Tree, Tree]:
    """(t*, s*, witness): t and s extended by grafts at their leaves until equivalent.

    Walks both trees together.  A leaf takes the other side's subtree; equal
    root arities recurse childwise; where arities differ both subtrees are
    topped up to the balanced tree of the componentwise maximal valence.
    """
    gt, gs, wit = _common(t, s)
    return graft(t, gt), graft(s, gs), wit


def compose(x: TreePair, y: TreePair) -> TreePair:
    """Diagram for x after y (y acts first)."""
    gx, gy, _ = _common(x.domain, y.range)
    return TreePair(graft(y.domain, gy), graft(x.range, gx))


def _exposed(t: Tree) -> dict[int, int]:
    """Leaf index of the first child -> arity, for carets whose children are all leaves."""
    out: dict[int, int] = {}
    counter = 0

    def walk(node: Tree):
        nonlocal counter
        if isinstance(node, Leaf):
            counter += 1
            return
        if all(isinstance(c, Leaf) for c in node.children):
            out[counter] = node.arity
            counter += node.arity
            return
        for c in node.children:
            walk(c)

    walk(t)
    return out


def _collapse(t: Tree, starts: set[int]) -> Tree:
    counter = 0

    def walk(node: Tree) -> Tree:
        nonlocal counter
        if isinstance(node, Leaf):
            counter += 1
            return node
        if counter in starts and all(isinstance(c, Leaf) for c in node.children):
            counter += node.arity
            return LEAF
        return Caret(node.arity, tuple(walk(c) for c in node.children))

    return walk(t)


def exposed_pairs(x: TreePair) -> list[tuple[int, int]]:
    """(first leaf index, arity) of every exposed caret pair."""
    a, b = _exposed(x.domain), _exposed(x.range)
    return sorted((i, n) for i, n in a.items() if b.get(i) == n)


def cancel_exposed_pairs(x: TreePair) -> TreePair:
    """Remove exposed caret pairs until none remain."""
    while True:
        pairs = exposed_pairs(x)
        if not pairs:
            return x
        starts = {i for i, _ in pairs}
        x = TreePair(_collapse(x.domain, starts), _collapse(x.range, starts))


def add_caret_pair(x: TreePair, leaf: int, arity: int) -> TreePair:
    """Hang an ``arity``-caret on leaf ``leaf`` of both trees."""
    g = [LEAF] * x.leaves
    g[leaf] = Caret(arity, (LEAF,) * arity)
    return TreePair(graft(x.domain, g), graft(x.range, g))


# ------------------------------------------------------------ maps to trees


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _valence_covering(den: int, sig: GroupSignature) -> list[int]:
    """Smallest-effort valence v with den | prod n_j^v_j."""
    v = [0] * sig.k
    size = 1
    while size % den:
        rest = den // gcd(size, den)
        p = next(p for p in range(2, rest + 1) if rest % p == 0)
        j = next(j for j, n in enumerate(sig.arities) if n % p == 0)
        v[j] += 1
        size *= sig.arities[j]
    return v


def from_map(f: PLMap, sig: GroupSignature) -> TreePair:
    """A diagram for ``f``, built on a common balanced grid and then reduced.

    Every breakpoint sits on the grid of 1/M, M = prod n_j^V_j.  On a piece of
    slope n^up / n^down each domain grid cell is cut into n^up equal leaves and
    each range grid cell into n^down, so leaf i maps linearly onto leaf i.
    The result is rarely minimal.
    """
    f.check(sig)
    den = 1
    for v in f.xs + f.ys:
        den = _lcm(den, v.denominator)
    base = _valence_covering(den, sig)
    splits = []
    for s in f.slopes():
        split = monoid_split(s, sig)
        if split is None:
            raise NotInGroup(f"slope {s} not in the slope group of {sig}")
        splits.append(split)
    extra = [max(down[j] for _, down in splits) for j in range(sig.k)]
    grid = [b + e for b, e in zip(base, extra)]
    cells = prod(n**v for n, v in zip(sig.arities, grid))
    skeleton = balanced_tree(grid, sig)
    dom_grafts: list[Tree] = []
    rng_grafts: list[Tree] = []
    for (up, down), x0, x1, y0, y1 in zip(splits, f.xs, f.xs[1:], f.ys, f.ys[1:]):
        dom_cells = (x1 - x0) * cells
        rng_cells = (y1 - y0) * cells
        assert dom_cells.denominator == 1 and rng_cells.denominator == 1
        dom_grafts += [balanced_tree(up, sig)] * int(dom_cells)
        rng_grafts += [balanced_tree(down, sig)] * int(rng_cells)
    d = TreePair(graft(skeleton, dom_grafts), graft(skeleton, rng_grafts))
    return cancel_exposed_pairs(d)
