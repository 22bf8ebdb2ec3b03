from __future__ import annotations

import random
from collections import Counter

import pytest

from freegroups.words import (
    MAX_RANK,
    check_letter,
    check_rank,
    concat_reduce,
    count_reduced_words,
    cyclically_reduce,
    format_word,
    free_reduce,
    invert,
    is_reduced,
    parse_word,
    random_reduced_word,
    sphere_size,
)
from oracles import reduced_words


def test_parse_format_roundtrip():
    assert parse_word("abA", 2) == (1, 2, -1)
    assert parse_word("", 2) == ()
    assert format_word((1, 2, -1)) == "abA"
    assert format_word(()) == ""
    for text in ("a", "bA", "abab", "BAba"):
        assert format_word(parse_word(text, 2)) == text


def test_parse_rejections():
    with pytest.raises(ValueError):
        parse_word("aA", 2)
    with pytest.raises(ValueError):
        parse_word("ac", 2)
    with pytest.raises(ValueError):
        parse_word("a b", 2)
    assert parse_word("aA", 2, reduce=True) == ()


def test_check_rank_and_letter():
    assert check_rank(1) == 1
    assert check_rank(MAX_RANK) == MAX_RANK
    for bad in (0, -1, MAX_RANK + 1, 2.0, "2"):
        with pytest.raises(ValueError):
            check_rank(bad)
    assert check_letter(-2, 2) == -2
    for bad in (0, 3, -3, 1.0):
        with pytest.raises(ValueError):
            check_letter(bad, 2)


def test_free_reduce():
    assert free_reduce([1, -1]) == ()
    assert free_reduce([1, 2, -2, -1]) == ()
    assert free_reduce([1, 2, -2, 1]) == (1, 1)
    assert free_reduce((1, 2, 1)) == (1, 2, 1)
    with pytest.raises(ValueError):
        free_reduce([1, 0, 2])
    with pytest.raises(ValueError):
        free_reduce([1, 3], r=2)


def test_is_reduced():
    assert is_reduced(())
    assert is_reduced((1, 2, -1))
    assert not is_reduced((1, -1))
    assert not is_reduced((2, 1, -1, 2))


def test_invert_and_concat():
    w = (1, 2, -1)
    assert invert(w) == (1, -2, -1)
    assert invert(invert(w)) == w
    assert concat_reduce(w, invert(w)) == ()
    assert concat_reduce((1, 2), (-2, 1)) == (1, 1)
    assert concat_reduce((), (1,)) == (1,)
    rng = random.Random(100)
    for _ in range(300):
        u = random_reduced_word(2, 8, rng)
        v = random_reduced_word(2, 8, rng)
        assert concat_reduce(u, v) == free_reduce(u + v)


def test_cyclically_reduce():
    assert cyclically_reduce(()) == ((), ())
    assert cyclically_reduce((1, 2, -1)) == ((1,), (2,))
    assert cyclically_reduce((1, 2)) == ((), (1, 2))
    assert cyclically_reduce((1, 2, 2, -1)) == ((1,), (2, 2))
    assert cyclically_reduce((2, 1, 1, -2)) == ((2,), (1, 1))
    rng = random.Random(11)
    for _ in range(300):
        w = random_reduced_word(2, 9, rng)
        v, t = cyclically_reduce(w)
        assert concat_reduce(concat_reduce(v, t), invert(v)) == w
        assert not t or t[0] != -t[-1]


def test_counts_match_enumeration():
    for r in (1, 2, 3):
        for n in range(5):
            assert sphere_size(r, n) == len(reduced_words(r, n, exact=True))
            assert count_reduced_words(r, n) == len(reduced_words(r, n))


def test_sphere_size_edges():
    assert sphere_size(2, 0) == 1
    assert sphere_size(2, 1) == 4
    assert sphere_size(2, 2) == 12
    with pytest.raises(ValueError):
        sphere_size(2, -1)


def test_random_word_support_and_determinism():
    rng = random.Random(7)
    seen = {random_reduced_word(2, 3, rng) for _ in range(4000)}
    assert seen == set(reduced_words(2, 3))
    a = [random_reduced_word(2, 6, random.Random(42)) for _ in range(50)]
    b = [random_reduced_word(2, 6, random.Random(42)) for _ in range(50)]
    assert a == b


def test_random_word_exact_mode():
    rng = random.Random(8)
    for _ in range(500):
        w = random_reduced_word(2, 5, rng, mode="exact")
        assert len(w) == 5 and is_reduced(w)
    assert random_reduced_word(2, 0, rng, mode="exact") == ()
    with pytest.raises(ValueError):
        random_reduced_word(2, 5, rng, mode="ball")
    with pytest.raises(ValueError):
        random_reduced_word(1, 5, rng)


def test_random_word_at_most_frequencies():
    # each word of length <= 2 should appear with frequency ~ 1/17
    rng = random.Random(9)
    counts = Counter(random_reduced_word(2, 2, rng) for _ in range(17000))
    assert len(counts) == 17
    for c in counts.values():
        assert 800 < c < 1200
