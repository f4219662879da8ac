"""Rooted ordered trees of mixed-arity carets and their interval semantics.

A tree is either :data:`LEAF` or a :class:`Caret` with ``arity`` ordered
children.  Every vertex stands for a closed subinterval of [0, 1]; an
``n``-caret cuts its interval into ``n`` equal pieces.  Trees are immutable
and hashable; edits build new trees.

Caret positions are addressed by paths: tuples of child indices read from
the root.  Text form: a leaf is ``.`` and a caret is ``[a c_1 ... c_a]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, NamedTuple, Optional, Sequence

from .signature import GroupSignature

Path = tuple[int, ...]


class Tree:
    __slots__ = ()
    leaves: int

    def is_leaf(self) -> bool:
        return isinstance(self, Leaf)

    def __str__(self) -> str:
        return format_tree(self)


@dataclass(frozen=True, repr=False)
class Leaf(Tree):
    __slots__ = ()

    @property
    def leaves(self) -> int:  # type: ignore[override]
        return 1

    def __repr__(self) -> str:
        return "LEAF"


@dataclass(frozen=True, repr=False)
class Caret(Tree):
    arity: int
    children: tuple[Tree, ...]
    leaves: int = field(init=False, compare=False, hash=False)  # type: ignore[assignment]

    def __post_init__(self):
        if len(self.children) != self.arity:
            raise ValueError(f"{self.arity}-caret given {len(self.children)} children")
        object.__setattr__(self, "leaves", sum(c.leaves for c in self.children))

    def __repr__(self) -> str:
        return f"Caret({format_tree(self)!r})"


LEAF = Leaf()


class TreeParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class PatternMismatch(ValueError):
    pass


class Move(NamedTuple):
    """Exchange of a p-caret over q-carets for a q-caret over p-carets at ``path``."""

    path: Path
    p: int
    q: int


def caret(arity: int, *children: Tree) -> Caret:
    if not children:
        children = (LEAF,) * arity
    return Caret(arity, tuple(children))


# ---------------------------------------------------------------- text form


def format_tree(t: Tree) -> str:
    if isinstance(t, Leaf):
        return "."
    return "[" + str(t.arity) + " " + " ".join(format_tree(c) for c in t.children) + "]"


def parse_tree(text: str, sig: Optional[GroupSignature] = None) -> Tree:
    """Parse the bracket form; arities outside ``sig`` are rejected."""
    pos = 0
    n = len(text)

    def skip():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def node() -> Tree:
        nonlocal pos
        skip()
        if pos >= n:
            raise TreeParseError("unexpected end of tree", pos)
        ch = text[pos]
        if ch == ".":
            pos += 1
            return LEAF
        if ch != "[":
            raise TreeParseError(f"unexpected {ch!r}", pos)
        pos += 1
        skip()
        start = pos
        while pos < n and text[pos].isdigit():
            pos += 1
        if start == pos:
            raise TreeParseError("expected caret arity", pos)
        arity = int(text[start:pos])
        if sig is not None and arity not in sig.arities:
            raise TreeParseError(f"arity {arity} not in signature {sig}", start)
        if arity < 2:
            raise TreeParseError(f"arity {arity} < 2", start)
        kids = []
        for _ in range(arity):
            kids.append(node())
        skip()
        if pos >= n or text[pos] != "]":
            raise TreeParseError(f"expected ']' closing {arity}-caret", pos)
        pos += 1
        return Caret(arity, tuple(kids))

    tree = node()
    skip()
    if pos != n:
        raise TreeParseError(f"trailing input {text[pos:]!r}", pos)
    return tree


# ------------------------------------------------------------ basic measures


def leaf_count(t: Tree) -> int:
    return t.leaves


def caret_count(t: Tree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + sum(caret_count(c) for c in t.children)


def depth(t: Tree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max(depth(c) for c in t.children)


def arities_used(t: Tree) -> set[int]:
    if isinstance(t, Leaf):
        return set()
    out = {t.arity}
    for c in t.children:
        out |= arities_used(c)
    return out


def check_signature(t: Tree, sig: GroupSignature) -> None:
    bad = arities_used(t) - set(sig.arities)
    if bad:
        raise ValueError(f"tree uses arities {sorted(bad)} outside {sig}")


# ------------------------------------------------------ interval semantics


def subdivision(t: Tree, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1)) -> list[tuple[Fraction, Fraction]]:
    """Leaf intervals of ``t`` from left to right, with the root standing for [lo, hi]."""
    out: list[tuple[Fraction, Fraction]] = []

    def walk(node: Tree, a: Fraction, b: Fraction):
        if isinstance(node, Leaf):
            out.append((a, b))
            return
        step = (b - a) / node.arity
        for i, child in enumerate(node.children):
            walk(child, a + i * step, a + (i + 1) * step)

    walk(t, Fraction(lo), Fraction(hi))
    return out


def cut_points(t: Tree) -> tuple[Fraction, ...]:
    """Interior endpoints of the subdivision, increasing."""
    return tuple(b for _, b in subdivision(t)[:-1])


def _path_profiles(t: Tree) -> list[tuple[tuple[int, int], ...]]:
    """Per leaf: sorted (arity, count) pairs of carets on its root path."""
    out = []

    def walk(node: Tree, counts: dict[int, int]):
        if isinstance(node, Leaf):
            out.append(tuple(sorted(counts.items())))
            return
        counts[node.arity] = counts.get(node.arity, 0) + 1
        for child in node.children:
            walk(child, counts)
        counts[node.arity] -= 1
        if not counts[node.arity]:
            del counts[node.arity]

    walk(t, {})
    return out


def valences(t: Tree, sig: GroupSignature) -> list[tuple[int, ...]]:
    """Valence vector of every leaf: how many n_j-carets sit on its root path."""
    check_signature(t, sig)
    index = {a: j for j, a in enumerate(sig.arities)}
    out = []
    for profile in _path_profiles(t):
        v = [0] * sig.k
        for arity, count in profile:
            v[index[arity]] = count
        out.append(tuple(v))
    return out


def trees_equivalent(t: Tree, s: Tree) -> bool:
    """Equal leaf counts and leafwise equal valences, i.e. the same subdivision."""
    if t.leaves != s.leaves:
        return False
    return _path_profiles(t) == _path_profiles(s)


# ------------------------------------------------------------ constructions


def balanced_tree(v: Sequence[int], sig: GroupSignature) -> Tree:
    """Tree whose every leaf has valence ``v``: n_1 rows first, then n_2, ..."""
    if len(v) != sig.k or any(x < 0 for x in v):
        raise ValueError(f"bad valence vector {tuple(v)} for {sig}")
    rows = [a for a, count in zip(sig.arities, v) for _ in range(count)]
    return _rows_tree(tuple(rows))


@lru_cache(maxsize=4096)
def _rows_tree(rows: tuple[int, ...]) -> Tree:
    if not rows:
        return LEAF
    child = _rows_tree(rows[1:])
    return Caret(rows[0], (child,) * rows[0])


def right_vine(carets: int, arity: int) -> Tree:
    """``carets`` carets of one arity, each hung from the last leaf of the previous."""
    t: Tree = LEAF
    for _ in range(carets):
        t = Caret(arity, (LEAF,) * (arity - 1) + (t,))
    return t


def graft(t: Tree, grafts: Sequence[Tree]) -> Tree:
    """Replace leaf i of ``t`` with ``grafts[i]``."""
    if len(grafts) != t.leaves:
        raise ValueError(f"{len(grafts)} grafts for {t.leaves} leaves")
    it = iter(grafts)

    def walk(node: Tree) -> Tree:
        if isinstance(node, Leaf):
            return next(it)
        return Caret(node.arity, tuple(walk(c) for c in node.children))

    return walk(t)


def graft_at_leaf(t: Tree, index: int, g: Tree) -> Tree:
    grafts = [LEAF] * t.leaves
    grafts[index] = g
    return graft(t, grafts)


# -------------------------------------------------------------- addressing


def subtree_at(t: Tree, path: Path) -> Tree:
    for i in path:
        if isinstance(t, Leaf):
            raise PatternMismatch(f"path {path} runs through a leaf")
        t = t.children[i]
    return t


def replace_at(t: Tree, path: Path, new: Tree) -> Tree:
    if not path:
        return new
    if isinstance(t, Leaf):
        raise PatternMismatch(f"path {path} runs through a leaf")
    i = path[0]
    kids = list(t.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Caret(t.arity, tuple(kids))


def level_order(t: Tree) -> list[tuple[Path, Caret]]:
    """Carets top level first, left to right within a level."""
    out = []
    queue: deque[tuple[Path, Tree]] = deque([((), t)])
    while queue:
        path, node = queue.popleft()
        if isinstance(node, Leaf):
            continue
        out.append((path, node))
        for i, child in enumerate(node.children):
            queue.append((path + (i,), child))
    return out


def caret_types(t: Tree) -> tuple[int, ...]:
    """Caret arities in level order."""
    return tuple(node.arity for _, node in level_order(t))


# -------------------------------------------------------- equivalence moves


def substitute(t: Tree, at: Path, p: int, q: int) -> Tree:
    """Swap the p-caret-over-q-carets block rooted at ``at`` for q-over-p.

    The p*q grandchild subtrees are carried along in left-to-right order, so
    the subdivision of the whole tree is unchanged.
    """
    if p == q:
        raise PatternMismatch("substitution needs two different arities")
    node = subtree_at(t, at)
    if isinstance(node, Leaf) or node.arity != p:
        raise PatternMismatch(f"no {p}-caret at {at}")
    if any(isinstance(c, Leaf) or c.arity != q for c in node.children):
        raise PatternMismatch(f"children of the {p}-caret at {at} are not all {q}-carets")
    grand = [g for c in node.children for g in c.children]  # type: ignore[union-attr]
    new = Caret(q, tuple(Caret(p, tuple(grand[i * p:(i + 1) * p])) for i in range(q)))
    return replace_at(t, at, new)


def replay(t: Tree, moves: Sequence[Move]) -> Tree:
    for mv in moves:
        t = substitute(t, mv.path, mv.p, mv.q)
    return t


def _min_valence(t: Tree, m: int) -> int:
    if isinstance(t, Leaf):
        return 0
    own = 1 if t.arity == m else 0
    return own + min(_min_valence(c, m) for c in t.children)


def _exposed_in_max(t: Tree, m: int, path: Path = ()) -> Optional[Path]:
    """First caret (depth first, left to right) of the maximal rooted subtree
    avoiding m-carets whose children all lie outside that subtree."""
    if isinstance(t, Leaf) or t.arity == m:
        return None
    for i, c in enumerate(t.children):
        found = _exposed_in_max(c, m, path + (i,))
        if found is not None:
            return found
    return path


def retype_root_moves(t: Tree, m: int) -> Optional[tuple[Tree, list[Move]]]:
    """Equivalent tree with an m-ary root, plus the substitutions used; None if impossible."""
    if isinstance(t, Leaf) or _min_valence(t, m) == 0:
        return None
    moves: list[Move] = []
    while t.arity != m:  # type: ignore[union-attr]
        at = _exposed_in_max(t, m)
        assert at is not None
        node = subtree_at(t, at)
        mv = Move(at, node.arity, m)  # type: ignore[union-attr]
        t = substitute(t, *mv)
        moves.append(mv)
    return t, moves


def retype_root(t: Tree, m: int) -> Optional[Tree]:
    """Equivalent tree with root arity m, or None when some leaf has m-valence 0."""
    res = retype_root_moves(t, m)
    return None if res is None else res[0]


def transform_sequence(t: Tree, s: Tree) -> Optional[list[Move]]:
    """Substitutions carrying ``t`` onto ``s`` node for node, or None if inequivalent.

    Works down ``s`` level by level, left to right, retyping the matching
    subtree of the current tree at each caret.
    """
    if not trees_equivalent(t, s):
        return None
    moves: list[Move] = []
    queue: deque[Path] = deque([()])
    while queue:
        path = queue.popleft()
        target = subtree_at(s, path)
        if isinstance(target, Leaf):
            continue
        here = subtree_at(t, path)
        if here.arity != target.arity:  # type: ignore[union-attr]
            res = retype_root_moves(here, target.arity)
            assert res is not None, "equivalent subtrees must be retypable"
            _, local = res
            for mv in local:
                full = Move(path + mv.path, mv.p, mv.q)
                t = substitute(t, *full)
                moves.append(full)
        for i in range(target.arity):
            queue.append(path + (i,))
    return moves


# ------------------------------------------------------------- enumeration


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _trees_with(leaves: int, arities: tuple[int, ...]) -> tuple[Tree, ...]:
    if leaves == 1:
        return (LEAF,)
    out = []
    for a in arities:
        if a > leaves:
            continue
        for comp in _compositions(leaves, a):
            pools = [_trees_with(c, arities) for c in comp]
            if any(not p for p in pools):
                continue
            for kids in product(*pools):
                out.append(Caret(a, kids))
    return tuple(out)


def enumerate_trees(leaves: int, sig: GroupSignature) -> Iterator[Tree]:
    """Every tree with exactly ``leaves`` leaves, once each.

    Order: root arity ascending, then lexicographic on the children's leaf
    counts, then recursively.
    """
    if leaves < 1:
        raise ValueError("a tree has at least one leaf")
    yield from _trees_with(leaves, sig.arities)
