import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings

from conftest import F2, F23, random_word, words
from thompson_stein.diagrams import (
    IDENTITY,
    NotInGroup,
    PLMap,
    TreePair,
    add_caret_pair,
    cancel_exposed_pairs,
    common_subdivision,
    compose,
    exposed_pairs,
    format_diagram,
    format_map,
    from_map,
    invert,
    is_identity,
    parse_diagram,
    parse_map,
    to_map,
)
from thompson_stein.trees import LEAF, caret, trees_equivalent
from thompson_stein.words import generator_diagram, word_diagram, y, z

NONMINIMAL_IDENTITY = TreePair(caret(2, caret(3), caret(3)), caret(3, caret(2), caret(2), caret(2)))


def pts(*pairs):
    return [(Fr(a), Fr(b)) for a, b in pairs]


def test_to_map_examples():
    assert to_map(IDENTITY) == PLMap.identity()
    assert to_map(NONMINIMAL_IDENTITY).is_identity()
    x0 = generator_diagram(z(1, 0), F2)
    assert to_map(x0).points == pts((0, 0), ("1/2", "1/4"), ("3/4", "1/2"), (1, 1))


def test_from_map_examples():
    assert from_map(PLMap.identity(), F23) == IDENTITY
    bad = PLMap.from_points(pts((0, 0), ("1/5", "1/2"), (1, 1)))
    with pytest.raises(NotInGroup):
        from_map(bad, F23)
    steep = PLMap.from_points(pts((0, 0), ("1/2", "1/10"), (1, 1)))
    with pytest.raises(NotInGroup):
        from_map(steep, F23)


def test_common_subdivision_examples():
    s = caret(2, caret(3), LEAF)
    assert common_subdivision(LEAF, s)[:2] == (s, s)
    assert common_subdivision(s, s) == (s, s, s)
    a, b, _ = common_subdivision(caret(2), caret(3))
    assert a.leaves == b.leaves == 6 and trees_equivalent(a, b)


def test_compose_examples():
    y2 = generator_diagram(y(2, 0), F23)
    z1 = generator_diagram(z(1, 0), F23)
    assert to_map(compose(invert(y2), z1)) == to_map(y2).inverse() @ to_map(z1)
    assert to_map(compose(z1, IDENTITY)) == to_map(z1)
    assert is_identity(compose(y2, invert(y2)))
    assert (to_map(invert(y2)) @ to_map(y2)).is_identity()


def test_invert_and_identity_examples():
    z1 = generator_diagram(z(1, 0), F23)
    assert invert(IDENTITY) == IDENTITY
    assert invert(invert(z1)) == z1
    assert is_identity(IDENTITY)
    assert is_identity(NONMINIMAL_IDENTITY)
    assert not is_identity(z1)


def test_cancel_exposed_pairs_examples():
    assert cancel_exposed_pairs(TreePair(caret(3), caret(3))) == IDENTITY
    assert cancel_exposed_pairs(NONMINIMAL_IDENTITY) == NONMINIMAL_IDENTITY
    assert exposed_pairs(NONMINIMAL_IDENTITY) == []
    z1 = generator_diagram(z(1, 0), F23)
    assert cancel_exposed_pairs(z1) == z1
    bigger = add_caret_pair(z1, 1, 3)
    assert bigger.leaves == z1.leaves + 2
    assert cancel_exposed_pairs(bigger) == z1


def test_plmap_canonical_form():
    f = PLMap.from_points(pts((0, 0), ("1/4", "1/4"), ("1/2", "1/2"), (1, 1)))
    assert f.is_identity()
    with pytest.raises(ValueError):
        PLMap.from_points(pts((0, 0), ("1/2", "1/2"), ("1/2", "3/4"), (1, 1)))
    with pytest.raises(ValueError):
        PLMap.from_points(pts(("1/2", 0), (1, 1)))


def test_text_forms():
    text = "[2 [3 . . .] .] | [2 . [3 . . .]]"
    d = parse_diagram(text, F23)
    assert format_diagram(d) == text
    f = to_map(d)
    assert parse_map(format_map(f)) == f
    assert format_map(PLMap.identity()) == "0,0;1,1"
    with pytest.raises(ValueError):
        parse_diagram("[2 . .] [2 . .]", F23)
    with pytest.raises(ValueError):
        parse_diagram("[2 . .] | [3 . . .]", F23)
    with pytest.raises(ValueError):
        parse_map("0,0;1")


@settings(max_examples=40, deadline=None)
@given(words(), words(), words())
def test_associativity(a, b, c):
    x, y_, w = (word_diagram(t, F23) for t in (a, b, c))
    assert to_map(compose(compose(x, y_), w)) == to_map(compose(x, compose(y_, w)))


@settings(max_examples=40, deadline=None)
@given(words(max_len=5))
def test_inverse_and_cancellation(w):
    x = word_diagram(w, F23)
    assert is_identity(compose(x, invert(x)))
    big = add_caret_pair(x, x.leaves - 1, 3)
    assert to_map(cancel_exposed_pairs(big)) == to_map(x)


@settings(max_examples=25, deadline=None)
@given(words(max_len=2))
def test_from_map_round_trip(w):
    f = to_map(word_diagram(w, F23))
    assert to_map(from_map(f, F23)) == f


def test_map_composition_matches_pointwise():
    rng = random.Random(5)
    for _ in range(20):
        f = to_map(word_diagram(random_word(F23, 3, rng), F23))
        g = to_map(word_diagram(random_word(F23, 3, rng), F23))
        h = f @ g
        for x in (Fr(k, 36) for k in range(37)):
            assert h(x) == f(g(x))
        assert (h @ h.inverse()).is_identity()
