"""Exact minimal diagrams and the unique minimal representative of an element.

Minimal diagrams are not unique once k > 1, so the canonical representative is
the minimal diagram that comes first under :func:`caret_order_key`.

Search.  A diagram for f is a cut set P of (0, 1) containing the breakpoints
of f such that P is the cut set of some domain tree and f(P) the cut set of
some range tree.  The search grows both trees top-down: choosing the arity of
an unresolved node adds its split points to P (pulled back through f on the
range side).  A node is unresolved when points of P fall strictly inside it.
Frontier nodes fall into independent components wherever a domain boundary
maps onto a range boundary.  Each component is solved by iterative deepening
on |P| from a lower bound: the fewest extra points either tree alone needs
(an exact one-sided relaxation), or the leaves forced by leaf sizes and
alignment between consecutive points.  Every complete state is a distinct
(domain, range) pair, since two branches differ in the arity chosen at some
node.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

from functools import lru_cache
from itertools import product
from typing import Optional

from gmpy2 import mpq

from .diagrams import (
    PLMap,
    TreePair,
    _collapse,
    add_caret_pair,
    cancel_exposed_pairs,
    exposed_pairs,
    to_map,
)
from .rationals import _independent, _prime_factors, _valuation, slope_decompose
from .signature import GroupSignature
from .trees import LEAF, Caret, Leaf, PatternMismatch, Tree, depth, level_order, substitute


# search arithmetic runs on gmpy2 rationals; they hash and compare like Fraction
Q0, Q1 = mpq(0), mpq(1)


# ------------------------------------------------------------ relaxation


class _Relaxation:
    """Fewest extra cut points a subtree needs to contain a relative point set."""

    def __init__(self, arities: tuple[int, ...]):
        self.arities = arities
        self.exact: dict[tuple, int] = {}
        self.lower: dict[tuple, int] = {}

    def cost(self, pts: tuple[Fraction, ...], cap: int) -> int:
        """Exact cost when it is <= cap, otherwise some value > cap."""
        step = 4
        while step < cap:
            got = self._cost(pts, step)
            if got <= step:
                return got
            step *= 2
        return self._cost(pts, cap)

    def _cost(self, pts: tuple[Fraction, ...], cap: int) -> int:
        if not pts:
            return 0
        hit = self.exact.get(pts)
        if hit is not None:
            return hit
        lb = self.lower.get(pts, 0)
        if lb > cap:
            return lb
        best = cap + 1
        for n in self.arities:
            buckets: list[list[Fraction]] = [[] for _ in range(n)]
            for p in pts:
                q = p * n
                i = q.numerator // q.denominator
                r = q - i
                if r:
                    buckets[i].append(r)
            present = {p * n for p in pts if (p * n).denominator == 1}
            extra = n - 1 - len(present)
            if extra >= best:
                continue
            total = extra
            for b in buckets:
                if b:
                    total += self._cost(tuple(b), best - 1 - total)
                    if total >= best:
                        break
            if total < best:
                best = total
        if best <= cap:
            self.exact[pts] = best
        else:
            self.lower[pts] = max(lb, best)
        return best


@lru_cache(maxsize=None)
def _relaxation(arities: tuple[int, ...]) -> _Relaxation:
    return _Relaxation(arities)


# ------------------------------------------------------------ search


def _memo(xs, ys):
    """Cached evaluation of the PL map through (xs, ys)."""
    xs = [mpq(v.numerator, v.denominator) for v in xs]
    ys = [mpq(v.numerator, v.denominator) for v in ys]
    last = len(xs) - 2
    cache: dict = {}

    def call(x):
        v = cache.get(x)
        if v is None:
            i = min(bisect_right(xs, x) - 1, last)
            v = cache[x] = ys[i] + (x - xs[i]) * (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        return v

    return call


@lru_cache(maxsize=None)
def _exponents(sig: GroupSignature):
    """Exponent vector u of a length or slope r = prod n_j^-u_j (independent arities)."""

    @lru_cache(maxsize=None)
    def exps(r) -> tuple[int, ...]:
        e = slope_decompose(Fraction(int(r.numerator), int(r.denominator)), sig)
        assert e is not None
        return tuple(-x for x in e.exponents)

    return exps

def _disjoint_supports(arities: tuple[int, ...]):
    """(arity, its primes) per arity, or None when two arities share a prime."""
    out, seen = [], set()
    for n in arities:
        primes = _prime_factors(n)
        if seen & set(primes):
            return None
        seen |= set(primes)
        out.append((n, tuple(primes)))
    return tuple(out)


# A frontier node is (lo, hi, points strictly inside).  A component is a run
# of domain frontier nodes together with the range frontier nodes covering its
# image, delimited by points that are boundaries on both sides; later choices
# inside one component never touch another.

Node = tuple  # (lo, hi, pts)
Choice = tuple  # (side, lo, hi, arity)

_FAIL: tuple = ()


def _insert(nodes: tuple[Node, ...], x: Fraction) -> tuple[Node, ...]:
    k = bisect_right([n[0] for n in nodes], x) - 1
    lo, hi, pts = nodes[k]
    return nodes[:k] + ((lo, hi, tuple(sorted(pts + (x,)))),) + nodes[k + 1 :]


def _split(node: Node, n: int) -> tuple[tuple[Node, ...], list[Fraction]]:
    lo, hi, pts = node
    step = (hi - lo) / n
    edges = [lo + step * i for i in range(n + 1)]
    inside = set(pts)
    kids = tuple((a, b, tuple(p for p in pts if a < p < b)) for a, b in zip(edges, edges[1:]))
    return kids, [e for e in edges[1:-1] if e not in inside]


# Solved components, shared across searches.  A component is stored rescaled
# so that its domain and range both span [0, 1]; splitting into equal parts
# commutes with affine maps, so the rescaled problem has the same answers.
#
# Solution sets are stored factored: a SolSet is a tuple of alternatives
# (choice, children), the choice in the component's own [0, 1] frame and each
# child a (frame, SolSet) pair placed inside it.  Many minimal diagrams then
# cost no more memory than the choices they share.
_SHARED_EXACT: dict[tuple, tuple[int, tuple]] = {}
_SHARED_LOWER: dict[tuple, int] = {}
# Both memos are dropped between searches once they pass this many entries,
# which keeps a sweep over tens of thousands of elements within about 2 GB.
SHARED_LIMIT = 150_000

Frame = tuple  # (domain origin, domain width, range origin, range width)


def _frame(comp) -> Frame:
    dom, rng = comp
    return (dom[0][0], dom[-1][1] - dom[0][0], rng[0][0], rng[-1][1] - rng[0][0])


def _relative(inner: Frame, outer: Frame) -> Frame:
    d0, dw, r0, rw = outer
    return ((inner[0] - d0) / dw, inner[1] / dw, (inner[2] - r0) / rw, inner[3] / rw)


def _inside(inner: Frame, outer: Frame) -> Frame:
    d0, dw, r0, rw = outer
    return (d0 + inner[0] * dw, inner[1] * dw, r0 + inner[2] * rw, inner[3] * rw)


def _expand(sols: tuple, frame: Frame):
    """Every completion in a SolSet, as absolute choices."""
    d0, dw, r0, rw = frame
    for (side, lo, hi, n), children in sols:
        if side == "d":
            head = ((side, d0 + lo * dw, d0 + hi * dw, n),)
        else:
            head = ((side, r0 + lo * rw, r0 + hi * rw, n),)
        subs = [list(_expand(c, _inside(f, frame))) for f, c in children]
        for combo in product(*subs):
            yield head + tuple(x for part in combo for x in part)


def _count(sols: tuple, memo: dict) -> int:
    key = id(sols)
    hit = memo.get(key)
    if hit is None:
        hit = 0
        for _, children in sols:
            ways = 1
            for _, c in children:
                ways *= _count(c, memo)
            hit += ways
        memo[key] = hit
    return hit


class _Search:
    def __init__(self, f: PLMap, sig: GroupSignature):
        self.f = f
        self.qxs = [mpq(v.numerator, v.denominator) for v in f.xs]
        self.qys = [mpq(v.numerator, v.denominator) for v in f.ys]
        self.finv = f.inverse()
        self.arities = sig.arities
        self.relax = _relaxation(sig.arities)
        self.exps = _exponents(sig) if _independent(sig.arities) else None
        self.supports = _disjoint_supports(sig.arities) if self.exps else None
        self.fx = _memo(f.xs, f.ys)
        self.fy = _memo(f.ys, f.xs)
        self.cell_cache: dict[tuple, int] = {}
        self.comp_cells: dict[tuple, int] = {}
        self.node_cost: dict[Node, tuple[int, bool]] = {}
        self.exact: dict[tuple, tuple[int, list[tuple[Choice, ...]]]] = {}

    def _need(self, nodes: tuple[Node, ...], cap: int) -> int:
        total = 0
        memo = self.node_cost
        for node in nodes:
            lo, hi, pts = node
            if not pts:
                continue
            room = cap - total
            got = memo.get(node)
            if got is None or (not got[1] and got[0] <= room):
                w = hi - lo
                c = self.relax.cost(tuple((p - lo) / w for p in pts), room)
                got = memo[node] = (c, c <= room)
            total += got[0]
            if total > cap:
                break
        return total

    def _cells(self, comp) -> int:
        """Extra points forced by leaf sizes and positions.

        Between consecutive points of P the map has one slope s.  A leaf there
        is a standard subinterval of its domain node and its image one of the
        range node; that caps the leaf length, and when the arities have
        disjoint prime supports it also pins the leaves to one grid, since
        both alignments must hold at once.  No leaf crosses a grid point.
        """
        dom, rng = comp
        total = 0
        j = 0
        f = self.fx
        cache = self.cell_cache
        for lo, hi, pts in dom:
            edges = (lo,) + pts + (hi,)
            for a, b in zip(edges, edges[1:]):
                fa = f(a)
                while rng[j][1] <= fa:
                    j += 1
                key = (a, b, lo, hi, rng[j][0], rng[j][1])
                c = cache.get(key)
                if c is None:
                    c = cache[key] = self._cell(a, b, lo, hi, rng[j][0], rng[j][1])
                total += c
        return total

    def _cell(self, a, b, lo, hi, rlo, rhi) -> int:
        fa = self.fx(a)
        s = (self.fx(b) - fa) / (b - a)
        du, ru, su = self.exps(hi - lo), self.exps(rhi - rlo), self.exps(s)
        scale = 1
        for n, d, r, e in zip(self.arities, du, ru, su):
            scale *= n ** max(d, r - e)
        if self.supports is not None:
            # leaves sit at lo + m t in the domain and need the matching
            # range alignment; t must clear the denominator of the offset
            offset = (lo - a + (fa - rlo) / s) * scale
            den = int(offset.denominator)
            for n, primes in self.supports:
                u = 0
                for p in primes:
                    v = 0
                    while den % p == 0:
                        den //= p
                        v += 1
                    if v:
                        u = max(u, -(-v // _valuation(n, p)))
                scale *= n**u
            if den == 1:
                lo_q, hi_q = (a - lo) * scale, (b - lo) * scale
                first = lo_q.numerator // lo_q.denominator
                last = -(-hi_q.numerator // hi_q.denominator)
                return last - first - 1
        q = (b - a) * scale
        return -(-q.numerator // q.denominator) - 1

    def bound(self, comp, cap: int) -> int:
        dom, rng = comp
        d = self._need(dom, cap)
        if d > cap:
            return d
        if self.exps is not None:
            c = self.comp_cells.get(comp)
            if c is None:
                c = self.comp_cells[comp] = self._cells(comp)
            d = max(d, c)
            if d > cap:
                return d
        return max(d, self._need(rng, cap))

    def components(self, dom: tuple[Node, ...], rng: tuple[Node, ...]) -> list[tuple]:
        """Open components, left to right."""
        out = []
        i = j = 0
        start_i = start_j = 0
        f = self.fx
        while i < len(dom):
            dhi = f(dom[i][1])
            rhi = rng[j][1]
            if dhi < rhi:
                i += 1
            elif rhi < dhi:
                j += 1
            else:
                i += 1
                j += 1
                cd, cr = dom[start_i:i], rng[start_j:j]
                if any(n[2] for n in cd) or any(n[2] for n in cr):
                    out.append((cd, cr))
                start_i, start_j = i, j
        return out

    def _branches(self, comp, side: str, k: int, limit: int) -> list:
        """Arity choices at one open node that survive the bound."""
        dom, rng = comp
        out = []
        for n in self.arities:
            if side == "d":
                node = dom[k]
                kids, new = _split(node, n)
                nd, nr = dom[:k] + kids + dom[k + 1 :], rng
                for x in new:
                    nr = _insert(nr, self.fx(x))
            else:
                node = rng[k]
                kids, new = _split(node, n)
                nd, nr = dom, rng[:k] + kids + rng[k + 1 :]
                for yv in new:
                    nd = _insert(nd, self.fy(yv))
            cost = len(new)
            if cost > limit:
                continue
            parts = self.components(nd, nr)
            bounds = []
            room = limit - cost
            for p in parts:
                b = self.bound(p, room)
                bounds.append(b)
                room -= b
                if room < 0:
                    break
            if room < 0:
                continue
            out.append(((side, node[0], node[1], n), cost, parts, bounds))
        return out

    def _pick(self, comp, limit: int) -> list:
        """Branches at the most constrained of the first open node on each side."""
        dom, rng = comp
        best = None
        for side, nodes in (("d", dom), ("r", rng)):
            k = next((k for k, n in enumerate(nodes) if n[2]), None)
            if k is None:
                continue
            br = self._branches(comp, side, k, limit)
            if best is None or len(br) < len(best):
                best = br
            if len(best) <= 1:
                break
        return best

    def _shared_key(self, comp) -> tuple:
        dom, rng = comp
        d0, dw, r0, rw = _frame(comp)
        i = bisect_right(self.qxs, d0)
        k = bisect_left(self.qxs, dom[-1][1], lo=i)
        bps = tuple(((self.qxs[t] - d0) / dw, (self.qys[t] - r0) / rw) for t in range(i, k))
        nd = tuple(((lo - d0) / dw, (hi - d0) / dw, tuple((p - d0) / dw for p in pts)) for lo, hi, pts in dom)
        nr = tuple(((lo - r0) / rw, (hi - r0) / rw, tuple((p - r0) / rw for p in pts)) for lo, hi, pts in rng)
        return (self.arities, nd, nr, bps)

    def solve(self, comp, budget: int) -> tuple[int, tuple]:
        """(cost, SolSet of all optimal completions) if the optimum is <= budget, else (lower bound, ()).

        Targets rise from the lower bound one at a time, so every attempt runs
        with a tight budget; failed targets are remembered.
        """
        hit = self.exact.get(comp)
        if hit is None:
            key = self._shared_key(comp)
            hit = _SHARED_EXACT.get(key)
            if hit is not None:
                self.exact[comp] = hit
        if hit is not None:
            return hit if hit[0] <= budget else (hit[0], ())
        lb = max(_SHARED_LOWER.get(key, 0), self.bound(comp, budget))
        target = lb
        while target <= budget:
            sols = self._solve_at(comp, target)
            if sols:
                self.exact[comp] = _SHARED_EXACT[key] = (target, sols)
                return target, sols
            target += 1
            _SHARED_LOWER[key] = target
        return target, ()

    def _solve_at(self, comp, target: int) -> tuple:
        """SolSet of all completions costing at most target (none cost less, by the caller)."""
        frame = _frame(comp)
        d0, dw, r0, rw = frame
        sols = []
        for choice, cost, parts, bounds in self._pick(comp, target):
            children = []
            total = cost
            rest = sum(bounds)
            for p, b in zip(parts, bounds):
                rest -= b
                c, ps = self.solve(p, target - total - rest)
                if not ps:
                    break
                total += c
                children.append((_relative(_frame(p), frame), ps))
            else:
                side, lo, hi, n = choice
                if side == "d":
                    rel = (side, (lo - d0) / dw, (hi - d0) / dw, n)
                else:
                    rel = (side, (lo - r0) / rw, (hi - r0) / rw, n)
                sols.append((rel, tuple(children)))
        return tuple(sols)


def _build(splits: dict[tuple, int]) -> Tree:
    def build(lo, hi) -> Tree:
        n = splits.get((lo, hi))
        if n is None:
            return LEAF
        step = (hi - lo) / n
        return Caret(n, tuple(build(lo + step * i, lo + step * (i + 1)) for i in range(n)))

    return build(Q0, Q1)


_UNBOUNDED = 1 << 62


def _search(f: PLMap, sig: GroupSignature, bound: Optional[int]) -> list[tuple[Frame, tuple]]:
    """(frame, SolSet) for each open component of the initial cut set."""
    if len(_SHARED_EXACT) + len(_SHARED_LOWER) > SHARED_LIMIT:
        _SHARED_EXACT.clear()
        _SHARED_LOWER.clear()
    search = _Search(f, sig)
    dom: tuple[Node, ...] = ((Q0, Q1, tuple(mpq(v.numerator, v.denominator) for v in f.xs[1:-1])),)
    rng: tuple[Node, ...] = ((Q0, Q1, tuple(mpq(v.numerator, v.denominator) for v in f.ys[1:-1])),)
    base = len(f.xs) - 2
    budget = _UNBOUNDED if bound is None else bound - 1 - base
    parts = search.components(dom, rng)
    bounds = [search.bound(p, budget) for p in parts]
    rest = sum(bounds)
    out = []
    for comp, b in zip(parts, bounds):
        rest -= b
        cost, ps = search.solve(comp, budget - rest)
        assert ps, "the seed diagram bounds the search"
        budget -= cost
        out.append((_frame(comp), ps))
    return out


def _completions(found: list[tuple[Frame, tuple]]):
    """Every minimal diagram of a search result, built one at a time."""
    for combo in product(*[list(_expand(sols, frame)) for frame, sols in found]):
        ds, rs = {}, {}
        for part in combo:
            for side, lo, hi, n in part:
                (ds if side == "d" else rs)[(lo, hi)] = n
        yield TreePair(_build(ds), _build(rs))


# ------------------------------------------------------------ public API


def minimal_diagrams(
    f: PLMap, sig: GroupSignature, upper: Optional[TreePair] = None
) -> list[TreePair]:
    """Every diagram of f with the fewest leaves.

    ``upper`` is any known diagram of f; its leaf count caps the search.
    Without it the search deepens until it finds a diagram.
    """
    bound = None if upper is None else upper.leaves
    return list(_completions(_search(f, sig, bound)))


def _shape_code(t: Tree) -> tuple[int, ...]:
    """Arity of every node in breadth-first order, 0 for leaves."""
    out = []
    queue = [t]
    for node in queue:
        if isinstance(node, Leaf):
            out.append(0)
        else:
            out.append(node.arity)
            queue.extend(node.children)
    return tuple(out)


def caret_order_key(d: TreePair) -> tuple:
    """Caret types of the domain then the range, level by level, left to right.

    Trees with equal type sequences can still differ in shape, so the
    breadth-first shape codes break the remaining ties.
    """
    dom = tuple(c.arity for _, c in level_order(d.domain))
    rng = tuple(c.arity for _, c in level_order(d.range))
    return (dom, rng, _shape_code(d.domain), _shape_code(d.range))


@dataclass(frozen=True)
class CanonicalElement:
    map: PLMap
    rep: TreePair
    sig: GroupSignature = field(compare=False)
    minimal_count: int = field(default=1, compare=False)

    @property
    def leaf_count(self) -> int:
        return self.rep.leaves

    @property
    def depth(self) -> int:
        return max(depth(self.rep.domain), depth(self.rep.range))

    def is_identity(self) -> bool:
        return self.map.is_identity()


_CACHE: dict[tuple[GroupSignature, PLMap], CanonicalElement] = {}
CACHE_LIMIT = 100_000


def canonical_from_map(
    f: PLMap, sig: GroupSignature, upper: Optional[TreePair] = None
) -> CanonicalElement:
    key = (sig, f)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    if upper is not None:
        upper = cancel_exposed_pairs(upper)
    if f.is_identity():
        elem = CanonicalElement(f, TreePair(LEAF, LEAF), sig)
    else:
        found = _search(f, sig, None if upper is None else upper.leaves)
        memo: dict = {}
        count = 1
        for _, sols in found:
            count *= _count(sols, memo)
        rep = min(_completions(found), key=caret_order_key)
        elem = CanonicalElement(f, rep, sig, count)
    if len(_CACHE) >= CACHE_LIMIT:
        _CACHE.clear()
    _CACHE[key] = elem
    return elem


def canonicalize(x: TreePair, sig: GroupSignature) -> CanonicalElement:
    """The element of x with its unique minimal representative."""
    return canonical_from_map(to_map(x), sig, x)


def clear_cache() -> None:
    _CACHE.clear()
    _SHARED_EXACT.clear()
    _SHARED_LOWER.clear()


# ------------------------------------------------------------ move closure


def _substitution_neighbours(t: Tree) -> list[Tree]:
    out = []
    for path, node in level_order(t):
        kids = node.children
        if not all(isinstance(c, Caret) for c in kids):
            continue
        q = kids[0].arity
        if q == node.arity or any(c.arity != q for c in kids):
            continue
        try:
            out.append(substitute(t, path, node.arity, q))
        except PatternMismatch:
            continue
    return out


def move_closure_check(x: TreePair, sig: GroupSignature, budget: int) -> bool:
    """Breadth-first search over equivalence moves for the canonical representative.

    Moves: cancel an exposed caret pair, add a caret pair (while the leaf count
    stays within ``budget`` leaves above the start), or substitute a block in
    either tree.  True iff the representative of x is reached.
    """
    target = canonicalize(x, sig).rep
    limit = x.leaves + budget
    seen = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for d in frontier:
            if d == target:
                return True
            cands: list[TreePair] = []
            for i, n in exposed_pairs(d):
                cands.append(TreePair(_collapse(d.domain, {i}), _collapse(d.range, {i})))
            for n in sig.arities:
                if d.leaves + n - 1 <= limit:
                    cands += [add_caret_pair(d, i, n) for i in range(d.leaves)]
            cands += [TreePair(t, d.range) for t in _substitution_neighbours(d.domain)]
            cands += [TreePair(d.domain, t) for t in _substitution_neighbours(d.range)]
            for c in cands:
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return False
