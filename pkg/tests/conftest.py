import random

import pytest
from hypothesis import strategies as st

from thompson_stein.signature import GroupSignature
from thompson_stein.words import Word, finite_generators

F2 = GroupSignature((2,))
F23 = GroupSignature((2, 3))
F35 = GroupSignature((3, 5))
F235 = GroupSignature((2, 3, 5))


@pytest.fixture
def sig():
    return F23


def random_word(sig: GroupSignature, length: int, rng: random.Random) -> Word:
    gens = finite_generators(sig)
    return Word(tuple(rng.choice(gens).with_exp(rng.choice((1, -1))) for _ in range(length)))


def words(sig: GroupSignature = F23, max_len: int = 4):
    gens = finite_generators(sig)
    letter = st.tuples(st.sampled_from(gens), st.sampled_from((1, -1))).map(lambda p: p[0].with_exp(p[1]))
    return st.lists(letter, max_size=max_len).map(lambda gs: Word(tuple(gs)))
