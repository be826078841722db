import random

import pytest
from hypothesis import given, strategies as st

from hallpath.rewriter import random_word
from hallpath.words import (DMINUS, DPLUS, Expr, LevelError, ParseError, Word, Y_word, e_word,
                            parse_expr, parse_word, z)


@given(st.integers(0, 10_000))
def test_word_text_round_trip(seed):
    w = random_word(random.Random(seed), 7, 3)
    assert parse_word(str(w)) == w if w.letters else parse_word(str(w)).source == w.source


def test_macros_expand():
    assert parse_word("1_0 e[2] 1_0") == Word((DMINUS, z(1, 2), DPLUS), 0)
    assert parse_word("Y[0,1]", 0) == Y_word((0, 1))
    assert str(e_word(-1)) == "1_0 d- z1^-1 d+ 1_0"


def test_levels_follow_the_letters():
    w = parse_word("1_0 d- d- z2 T1 1_2")
    assert (w.source, w.target) == (2, 0)
    assert w.letter_levels() == [1, 2, 2, 2]


def test_bad_words_are_rejected():
    with pytest.raises(ParseError):
        parse_word("1_0 d- 1_0")           # d- cannot be a loop
    with pytest.raises(ParseError):
        parse_word("1_1 z2 1_1")           # no z2 at level 1
    with pytest.raises(ParseError):
        parse_word("d- x1", 1)


def test_expr_algebra_and_json():
    a = parse_expr("(1 - q)*[1_0 d- phi 1_1] + (1)*[1_0 d- 1_1]")
    assert Expr.from_json(a.to_json()) == a
    assert (a - a).is_zero()
    with pytest.raises(LevelError):
        a + Expr.of(parse_word("1_0 e[0] 1_0"))
