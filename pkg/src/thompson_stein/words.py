"""Generators, words, the normal form, and the two presentations.

Conventions
-----------
``(z_j)_i`` hangs an n_j-caret on leaf i of an n_1-vine; ``(y_j)_i`` puts an
n_j-caret on the right spine with leftmost leaf (n_1 - 1) * i.  A word is read
as a product of maps, leftmost outermost, so appending a generator on the
right grows the range tree.  ``(y_1)_i`` is the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .diagrams import PLMap, TreePair, cancel_exposed_pairs, compose, invert, to_map
from .minimizer import CanonicalElement, canonical_from_map
from .signature import GroupSignature, SignatureError
from .trees import LEAF, Caret, Leaf, Tree, graft_at_leaf, right_vine

# ------------------------------------------------------------------ tokens


@dataclass(frozen=True)
class Generator:
    family: str  # "y" or "z"
    j: int
    i: int
    exp: int = 1

    def __post_init__(self):
        if self.family not in ("y", "z"):
            raise ValueError(f"unknown generator family {self.family!r}")
        if self.j < 1 or self.i < 0:
            raise ValueError(f"bad generator indices {self.family}{self.j}_{self.i}")
        if self.exp == 0:
            raise ValueError("zero exponent")

    @property
    def base(self) -> "Generator":
        return Generator(self.family, self.j, self.i, 1)

    def inverse(self) -> "Generator":
        return Generator(self.family, self.j, self.i, -self.exp)

    def with_exp(self, exp: int) -> "Generator":
        return Generator(self.family, self.j, self.i, exp)

    def is_trivial(self) -> bool:
        return self.family == "y" and self.j == 1

    def __str__(self) -> str:
        head = f"{self.family}{self.j}_{self.i}"
        return head if self.exp == 1 else f"{head}^{self.exp}"


@dataclass(frozen=True)
class Word:
    tokens: tuple[Generator, ...] = ()

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def length(self) -> int:
        """Word length counting each letter of a power separately."""
        return sum(abs(g.exp) for g in self.tokens)

    def __mul__(self, other: "Word") -> "Word":
        return normalize(Word(self.tokens + other.tokens))

    def inverse(self) -> "Word":
        return Word(tuple(g.inverse() for g in reversed(self.tokens)))

    def __str__(self) -> str:
        return print_word(self)


def word(*tokens: Generator) -> Word:
    return normalize(Word(tuple(tokens)))


def z(j: int, i: int, exp: int = 1) -> Generator:
    return Generator("z", j, i, exp)


def y(j: int, i: int, exp: int = 1) -> Generator:
    return Generator("y", j, i, exp)


class WordParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"([yz])(\d+)_(\d+)(?:\^(-?\d+))?")


def parse_word(text: str, sig: Optional[GroupSignature] = None) -> Word:
    """Parse whitespace-separated tokens ``y<j>_<i>`` / ``z<j>_<i>`` with optional ``^<e>``."""
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or (m.end() < n and not text[m.end()].isspace()):
            raise WordParseError(f"bad token {text[pos:].split()[0]!r}", pos)
        fam, j, i, e = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
        exp = int(e) if e is not None else 1
        if exp == 0:
            raise WordParseError("zero exponent", pos)
        if j < 1 or (sig is not None and j > sig.k):
            raise WordParseError(f"unknown family index {j}", pos)
        out.append(Generator(fam, j, i, exp))
        pos = m.end()
    return normalize(Word(tuple(out)))


def normalize(w: Word) -> Word:
    """Merge adjacent letters on the same generator, dropping zero powers."""
    stack: list[Generator] = []
    for g in w.tokens:
        if stack and stack[-1].base == g.base:
            e = stack.pop().exp + g.exp
            if e:
                stack.append(g.with_exp(e))
        else:
            stack.append(g)
    return Word(tuple(stack))


def print_word(w: Word) -> str:
    return " ".join(str(g) for g in w.tokens)


# ------------------------------------------------------------- evaluation


def generator_diagram(g: Generator, sig: GroupSignature) -> TreePair:
    """Diagram of a generator power."""
    d = _base_diagram(g.family, g.j, g.i, sig)
    if g.exp < 0:
        d = invert(d)
    out = d
    for _ in range(abs(g.exp) - 1):
        out = compose(out, d)
    return out


@lru_cache(maxsize=None)
def _base_diagram(family: str, j: int, i: int, sig: GroupSignature) -> TreePair:
    n1 = sig.n1
    nj = sig.arity(j)
    if family == "y" and j == 1:
        return TreePair(LEAF, LEAF)
    units = sig.spine_units(j)
    hang = Caret(nj, (LEAF,) * nj)
    if family == "z":
        q = i // (n1 - 1)
        dom = right_vine(q + 1 + units, n1)
        rng = graft_at_leaf(right_vine(q + 1, n1), i, hang)
    else:
        dom = right_vine(i + units, n1)
        base = right_vine(i, n1)
        rng = graft_at_leaf(base, base.leaves - 1, hang)
    return TreePair(dom, rng)


@lru_cache(maxsize=None)
def _base_map(family: str, j: int, i: int, sig: GroupSignature) -> PLMap:
    return to_map(_base_diagram(family, j, i, sig))


def generator_map(g: Generator, sig: GroupSignature) -> PLMap:
    f = _base_map(g.family, g.j, g.i, sig)
    if g.exp < 0:
        f = f.inverse()
    out = f
    for _ in range(abs(g.exp) - 1):
        out = out @ f
    return out


def word_map(w: Word, sig: GroupSignature) -> PLMap:
    out = PLMap.identity()
    for g in w.tokens:
        out = out @ generator_map(g, sig)
    return out


def word_diagram(w: Word, sig: GroupSignature) -> TreePair:
    out = TreePair(LEAF, LEAF)
    for g in w.tokens:
        out = cancel_exposed_pairs(compose(out, generator_diagram(g, sig)))
    return out


def evaluate(w: Word, sig: GroupSignature) -> CanonicalElement:
    """The element a word represents, with its canonical minimal diagram."""
    d = word_diagram(w, sig)
    return canonical_from_map(to_map(d), sig, d)


# --------------------------------------------------- leaf exponent matrices


@dataclass(frozen=True)
class LeafExponentMatrix:
    """Columns (caret arity, run length), root-nearest first."""

    columns: tuple[tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return bool(self.columns)


def leaf_exponent_matrices(t: Tree) -> list[LeafExponentMatrix]:
    out: list[LeafExponentMatrix] = []

    def walk(node: Tree, chain: tuple[int, ...], right: bool):
        if isinstance(node, Leaf):
            runs: list[list[int]] = []
            for a in chain:
                if runs and runs[-1][0] == a:
                    runs[-1][1] += 1
                else:
                    runs.append([a, 1])
            out.append(LeafExponentMatrix(tuple((a, d) for a, d in runs)))
            return
        last = len(node.children) - 1
        for idx, child in enumerate(node.children):
            if idx == 0 and not right:
                nxt = chain + (node.arity,)
            else:
                nxt = ()
            walk(child, nxt, right and idx == last)

    walk(t, (), True)
    return out


def right_spine(t: Tree) -> list[tuple[int, int]]:
    """(leftmost leaf index, arity) of each right caret, top-down."""
    out = []
    offset = 0
    node = t
    while isinstance(node, Caret):
        out.append((offset, node.arity))
        offset += sum(c.leaves for c in node.children[:-1])
        node = node.children[-1]
    return out


# ------------------------------------------------------------ normal form


class NormalFormError(ValueError):
    pass


@dataclass(frozen=True)
class NormalForm:
    """Normal form data.

    ``y_pos`` holds (delta, beta), ``z_pos`` holds (epsilon, alpha, e).  The
    negative part is stored as the normal form of the positive word w_- with
    x = w_+ w_-^{-1}: ``z_neg`` holds (theta, Gamma, d) and ``y_neg`` holds
    (theta, lambda), both in the order they occur in w_-.
    """

    sig: GroupSignature = field(compare=False)
    y_pos: tuple[tuple[int, int], ...] = ()
    z_pos: tuple[tuple[int, int, int], ...] = ()
    z_neg: tuple[tuple[int, int, int], ...] = ()
    y_neg: tuple[tuple[int, int], ...] = ()

    def positive_word(self) -> Word:
        return Word(
            tuple(y(d, b) for d, b in self.y_pos) + tuple(z(e, a, p) for e, a, p in self.z_pos)
        )

    def negative_word(self) -> Word:
        """The positive word w_-."""
        return Word(
            tuple(y(t, l) for t, l in self.y_neg) + tuple(z(t, g, d) for t, g, d in self.z_neg)
        )

    def to_word(self) -> Word:
        return Word(self.positive_word().tokens + self.negative_word().inverse().tokens)

    def __str__(self) -> str:
        return print_word(self.to_word())

    def violations(self) -> list[str]:
        """Index conditions that fail; empty for a well-formed normal form."""
        out = []
        for name, ys, zs in (("positive", self.y_pos, self.z_pos), ("negative", self.y_neg, self.z_neg)):
            for d, _ in ys:
                if not 2 <= d <= self.sig.k:
                    out.append(f"{name} y family {d} outside 2..k")
            for (d0, b0), (_, b1) in zip(ys, ys[1:]):
                if b1 < b0 + self.sig.spine_units(d0):
                    out.append(f"{name} y indices {b0}, {b1} overlap")
            for _, _, e in zs:
                if e < 1:
                    out.append(f"{name} z exponent {e} not positive")
            for (e0, a0, _), (e1, a1, _) in zip(zs, zs[1:]):
                if a1 < a0:
                    out.append(f"{name} z indices {a0}, {a1} decrease")
                elif a1 == a0 and e1 == e0:
                    out.append(f"{name} repeated z family {e0} at index {a0}")
        return out

    def index_clash(self) -> bool:
        """True when the last positive z index equals the last negative one."""
        return bool(self.z_pos and self.z_neg and self.z_pos[-1][1] == self.z_neg[-1][1])


def positive_factor(x: CanonicalElement) -> tuple[TreePair, TreePair]:
    """((V, T_+), (V, T_-)) for the representative (T_-, T_+), V a right n_1-vine."""
    sig = x.sig
    sig.require_divisible()
    dom, rng = x.rep.domain, x.rep.range
    assert (dom.leaves - 1) % (sig.n1 - 1) == 0
    vine = right_vine((dom.leaves - 1) // (sig.n1 - 1), sig.n1)
    return TreePair(vine, rng), TreePair(vine, dom)


def _positive_parts(t: Tree, sig: GroupSignature):
    ys = []
    offset = 0
    for _, arity in right_spine(t):
        if arity != sig.n1:
            ys.append((sig.family(arity), offset // (sig.n1 - 1)))
        offset += arity - 1
    zs = []
    for idx, m in enumerate(leaf_exponent_matrices(t)):
        for arity, run in m.columns:
            zs.append((sig.family(arity), idx, run))
    return tuple(ys), tuple(zs)


def normal_form(x: CanonicalElement) -> NormalForm:
    """Normal form read off the canonical representative."""
    sig = x.sig
    sig.require_divisible()
    yp, zp = _positive_parts(x.rep.range, sig)
    yn, zn = _positive_parts(x.rep.domain, sig)
    return NormalForm(sig, yp, zp, zn, yn)


def positive_tree(ys: Sequence[tuple[int, int]], zs: Sequence[tuple[int, int, int]], sig: GroupSignature) -> Tree:
    """Range tree of the positive word with the given normal-form parts."""
    n1 = sig.n1
    spine: list[int] = []
    offset = 0
    for d, b in ys:
        while offset < (n1 - 1) * b:
            spine.append(n1)
            offset += n1 - 1
        if offset != (n1 - 1) * b:
            raise NormalFormError(f"y index {b} overlaps the previous spine caret")
        spine.append(sig.arity(d))
        offset += sig.arity(d) - 1
    leaves_right = offset + 1
    needed = max((a for _, a, _ in zs), default=-1)
    while needed >= leaves_right - 1:
        spine.append(n1)
        leaves_right += n1 - 1
    t: Tree = LEAF
    for a in reversed(spine):
        t = Caret(a, (LEAF,) * (a - 1) + (t,))
    for e, a, p in zs:
        hang = Caret(sig.arity(e), (LEAF,) * sig.arity(e))
        for _ in range(p):
            t = graft_at_leaf(t, a, hang)
    return t


def _padded_positive(t: Tree, sig: GroupSignature) -> TreePair:
    return TreePair(right_vine((t.leaves - 1) // (sig.n1 - 1), sig.n1), t)


def diagram_from_normal_form(nf: NormalForm) -> TreePair:
    sig = nf.sig
    sig.require_divisible()
    pos = _padded_positive(positive_tree(nf.y_pos, nf.z_pos, sig), sig)
    neg = _padded_positive(positive_tree(nf.y_neg, nf.z_neg, sig), sig)
    return cancel_exposed_pairs(compose(pos, invert(neg)))


def split_normal_form_word(w: Word, sig: GroupSignature) -> NormalForm:
    """Read a word laid out as a normal form back into its index data."""
    toks = list(w.tokens)
    pos = [g for g in toks if g.exp > 0]
    neg = [g for g in toks if g.exp < 0]
    if toks != pos + neg:
        raise NormalFormError("positive letters must precede negative ones")
    negw = Word(tuple(neg)).inverse()

    def parts(gs):
        ys, zs = [], []
        for g in gs:
            if g.family == "y":
                if zs or g.exp != 1:
                    raise NormalFormError(f"misplaced letter {g}")
                ys.append((g.j, g.i))
            else:
                zs.append((g.j, g.i, g.exp))
        return tuple(ys), tuple(zs)

    yp, zp = parts(pos)
    yn, zn = parts(negw.tokens)
    return NormalForm(sig, yp, zp, zn, yn)


# ------------------------------------------------------------ presentations


@dataclass(frozen=True)
class Relator:
    name: str
    lhs: Word
    rhs: Word


def _w(gens: Iterable[Generator]) -> Word:
    return normalize(Word(tuple(g for g in gens if not g.is_trivial())))


def _shift(g: Generator, by_family: int, sig: GroupSignature) -> Generator:
    """Index of g after conjugating past (z_r)_i with i below it."""
    if g.family == "z":
        return Generator("z", g.j, g.i + sig.arity(by_family) - 1, g.exp)
    return Generator("y", g.j, g.i + sig.spine_units(by_family), g.exp)


def _conjugation_applies(g: Generator, i: int, sig: GroupSignature) -> bool:
    """(z_r)_i sits to the left of g's caret."""
    if g.family == "z":
        return i < g.i
    return i < g.i * (sig.n1 - 1)


def _relation_two(i: int, j: int, l: int, sig: GroupSignature) -> Relator:
    n1 = sig.n1
    ni, nj = sig.arity(i), sig.arity(j)
    bi, bj = sig.spine_units(i), sig.spine_units(j)
    base = l * (n1 - 1)
    lhs = [y(i, l), y(j, l + bi)] + [z(j, base + t * nj) for t in range(ni - 1)]
    rhs = [y(j, l), y(i, l + bj)] + [z(i, base + t * ni) for t in range(nj - 1)]
    return Relator(f"spine substitution i={i} j={j} l={l}", _w(lhs), _w(rhs))


def _relation_three(i: int, j: int, l: int, sig: GroupSignature) -> Relator:
    ni, nj = sig.arity(i), sig.arity(j)
    lhs = [z(i, l)] + [z(j, l + t * nj) for t in range(ni)]
    rhs = [z(j, l)] + [z(i, l + t * ni) for t in range(nj)]
    return Relator(f"inner substitution i={i} j={j} l={l}", _w(lhs), _w(rhs))


def finite_generators(sig: GroupSignature) -> list[Generator]:
    """The finite generating set X."""
    sig.require_divisible()
    out = []
    for j in range(2, sig.k + 1):
        out += [y(j, i) for i in range(sig.arity(j))]
    for j in range(1, sig.k + 1):
        out += [z(j, i) for i in range(sig.arity(j))]
    return out


def relators(sig: GroupSignature, finite: bool, limit: Optional[int] = None) -> list[Relator]:
    """Relations of the infinite (indices <= ``limit``, default 2 n_k) or finite presentation."""
    sig.require_divisible()
    k = sig.k
    out: list[Relator] = []
    pairs = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j]
    if not finite:
        top = 2 * sig.nk if limit is None else limit
        gammas = [z(m, jj) for m in range(1, k + 1) for jj in range(top + 1)]
        gammas += [y(m, jj) for m in range(2, k + 1) for jj in range(top + 1)]
        for g in gammas:
            for r in range(1, k + 1):
                for i in range(top + 1):
                    if _conjugation_applies(g, i, sig):
                        out.append(
                            Relator(
                                f"conjugation {g} by z{r}_{i}",
                                _w([g, z(r, i)]),
                                _w([z(r, i), _shift(g, r, sig)]),
                            )
                        )
        for i, j in pairs:
            for l in range(top + 1):
                out.append(_relation_two(i, j, l, sig))
                out.append(_relation_three(i, j, l, sig))
        return out
    xs = finite_generators(sig)
    for g in xs:
        for l in range(1, k + 1):
            z0 = z(l, 0)
            for i in range(1, sig.arity(l)):
                if _conjugation_applies(g, i, sig):
                    zi = z(l, i)
                    out.append(
                        Relator(
                            f"finite conjugation (a) {g} by z{l}_{i}",
                            _w([zi.inverse(), g, zi]),
                            _w([z0.inverse(), g, z0]),
                        )
                    )
                    out.append(
                        Relator(
                            f"finite conjugation (b) {g} by z{l}_{i}",
                            _w([zi.inverse(), z(l, 0, -1), g, z0, zi]),
                            _w([z(l, 0, -2), g, z(l, 0, 2)]),
                        )
                    )
    for g in xs:
        if g.i != 1:
            continue
        for l in range(1, k + 1):
            top = z(l, sig.arity(l) - 1)
            out.append(
                Relator(
                    f"finite conjugation (c) {g} by z{l}",
                    _w([top.inverse(), z(l, 0, -2), g, z(l, 0, 2), top]),
                    _w([z(l, 0, -3), g, z(l, 0, 3)]),
                )
            )
    for i, j in pairs:
        for l in (0, 1):
            out.append(_relation_two(i, j, l, sig))
            out.append(_relation_three(i, j, l, sig))
    return out


def check_relators(rels: Iterable[Relator], sig: GroupSignature) -> list[Relator]:
    """Relators whose two sides are different maps."""
    return [r for r in rels if word_map(r.lhs, sig) != word_map(r.rhs, sig)]


__all__ = [
    "Generator",
    "LeafExponentMatrix",
    "NormalForm",
    "NormalFormError",
    "Relator",
    "SignatureError",
    "Word",
    "WordParseError",
    "check_relators",
    "diagram_from_normal_form",
    "evaluate",
    "finite_generators",
    "generator_diagram",
    "generator_map",
    "leaf_exponent_matrices",
    "normal_form",
    "normalize",
    "parse_word",
    "positive_factor",
    "positive_tree",
    "print_word",
    "relators",
    "right_spine",
    "split_normal_form_word",
    "word",
    "word_diagram",
    "word_map",
    "y",
    "z",
]
