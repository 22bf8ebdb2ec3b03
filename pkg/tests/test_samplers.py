from __future__ import annotations

import random
from collections import Counter

import pytest

from freegroups.partial_injections import CountCache
from freegroups.samplers import (
    GenericityParams,
    SamplingError,
    WordTuple,
    central_outer_structure,
    has_repeated_long_factor,
    in_Y,
    sample_graph_subgroup,
    sample_word_tuple,
)
from freegroups.stallings import StallingsGraph, fold, is_admissible, serialize
from freegroups.words import invert, is_reduced
from oracles import enumerate_admissible_graphs


def test_params_validation():
    p = GenericityParams()
    assert (p.alpha, p.lam, p.beta) == (0.75, 0.125, 0.25)
    assert p.prefix_length(8) == 1
    assert p.prefix_length(100) == 13
    GenericityParams(alpha=0.5, lam=0.2, beta=0.1)
    with pytest.raises(ValueError):
        GenericityParams(alpha=0.5, lam=0.25, beta=0.1)  # needs 2*lam < alpha
    with pytest.raises(ValueError):
        GenericityParams(alpha=1.0, lam=0.1, beta=0.1)
    with pytest.raises(ValueError):
        GenericityParams(alpha=0.5, lam=0.0, beta=0.1)
    with pytest.raises(ValueError):
        GenericityParams(beta=1.0)
    with pytest.raises(ValueError):
        GenericityParams(beta=0.0)


def test_word_tuple_validation():
    t = WordTuple(((1, 2), (2, 1)), 2, 2, 2)
    assert t.graph() == fold(["ab", "ba"], 2)
    with pytest.raises(ValueError):
        WordTuple(((1, 2),), 2, 2, 2)  # k mismatch
    with pytest.raises(ValueError):
        WordTuple(((1, -1),), 2, 1, 2)  # not reduced
    with pytest.raises(ValueError):
        WordTuple(((1, 3),), 2, 1, 2)  # letter outside alphabet
    with pytest.raises(ValueError):
        WordTuple(((1, 2, 1),), 2, 1, 2)  # longer than n


def test_sample_word_tuple():
    rng = random.Random(31)
    for _ in range(100):
        t = sample_word_tuple(2, 3, 12, rng)
        assert t.k == 3 and t.r == 2 and t.n == 12
        assert all(len(w) <= 12 and is_reduced(w) for w in t.words)
    a = sample_word_tuple(2, 3, 12, random.Random(5))
    b = sample_word_tuple(2, 3, 12, random.Random(5))
    assert a.words == b.words
    with pytest.raises(ValueError):
        sample_word_tuple(2, 0, 12, rng)


def test_in_Y():
    p = GenericityParams()
    assert in_Y(WordTuple(((1, 2), (2, 1)), 2, 2, 2), p)
    # identical words collide on every prefix
    assert not in_Y(WordTuple(((1, 2), (1, 2)), 2, 2, 2), p)
    # a length <= alpha*n word disqualifies the tuple
    assert not in_Y(WordTuple(((1,), (2, 1)), 2, 2, 2), p)
    assert not in_Y(WordTuple(((1, 2, 1), (2, 1, 2)), 2, 2, 4), p)
    # prefix of a word colliding with a prefix of an inverse
    assert not in_Y(WordTuple(((1, 2), (-1, 2)), 2, 2, 2), p)
    assert in_Y(WordTuple(((1,) * 8,), 2, 1, 8), p)


def test_in_Y_matches_direct_prefix_check():
    p = GenericityParams()
    rng = random.Random(32)
    agree_true = 0
    for _ in range(300):
        t = sample_word_tuple(2, 2, 20, rng)
        mu = p.prefix_length(t.n)
        direct = all(len(w) > p.alpha * t.n for w in t.words)
        if direct:
            prefixes = [w[:mu] for w in t.words] + [invert(w)[:mu] for w in t.words]
            direct = len(set(prefixes)) == 2 * t.k
        got = in_Y(t, p)
        assert got == direct
        agree_true += got
    assert 0 < agree_true < 300  # both outcomes exercised


def test_repeated_long_factor():
    t = WordTuple(((1, 2, 1, 2),), 2, 1, 4)
    assert has_repeated_long_factor(t, 0.5)  # "ab" occurs twice
    assert not has_repeated_long_factor(WordTuple(((1, 2),), 2, 1, 2), 0.9)
    # a factor equal to the inverse of another counts as a repeat
    t2 = WordTuple(((1, 2), (-2, -1)), 2, 2, 2)
    assert has_repeated_long_factor(t2, 0.9)
    # n override changes the scan length
    t3 = WordTuple(((1, 2, 1, 2),), 2, 1, 4)
    assert has_repeated_long_factor(t3, 0.5, n=4)
    assert not has_repeated_long_factor(t3, 0.5, n=8)  # factor length 4: no repeat
    with pytest.raises(ValueError):
        has_repeated_long_factor(t, 1.0)


def test_central_outer_structure_cycle():
    p = GenericityParams()
    t = WordTuple(((1,) * 8,), 2, 1, 8)
    assert central_outer_structure(t, p) == {
        "tree_vertices": 3,
        "tree_is_tree": True,
        "outer_loop_lengths": [6],
        "leaves": 2,
    }
    # degenerate short-word tuple: central part swallows the whole graph
    t2 = WordTuple(((1, 2), (2, 1)), 2, 2, 2)
    assert central_outer_structure(t2, p) == {
        "tree_vertices": 3,
        "tree_is_tree": False,
        "outer_loop_lengths": [],
        "leaves": 0,
    }
    with pytest.raises(ValueError):
        central_outer_structure(WordTuple(((1, 2), (1, 2)), 2, 2, 2), p)


def test_central_outer_structure_generic_shape():
    # for long uncollided tuples the central part is a tree with 2k leaves
    # and one outer loop per word
    p = GenericityParams()
    rng = random.Random(33)
    checked = 0
    while checked < 20:
        t = sample_word_tuple(2, 4, 60, rng)
        if not in_Y(t, p):
            continue
        info = central_outer_structure(t, p)
        if not info["tree_is_tree"]:
            continue
        assert info["leaves"] == 2 * t.k
        assert len(info["outer_loop_lengths"]) == t.k
        mu = p.prefix_length(t.n)
        for length in info["outer_loop_lengths"]:
            assert length <= t.n - 2 * mu + 1
        checked += 1


def test_sample_graph_subgroup(cache):
    rng = random.Random(34)
    for n in (1, 2, 5, 30):
        g = sample_graph_subgroup(2, n, cache, rng)
        assert g.n == n and g.r == 2
        assert is_admissible(g)
        assert StallingsGraph(2, n, g.edge_list()) == g
    a = serialize(sample_graph_subgroup(2, 12, cache, random.Random(6)))
    b = serialize(sample_graph_subgroup(2, 12, cache, random.Random(6)))
    assert a == b
    with pytest.raises(ValueError):
        sample_graph_subgroup(1, 5, cache, rng)
    with pytest.raises(ValueError):
        sample_graph_subgroup(2, 0, cache, rng)


def test_sample_graph_subgroup_uniform(cache):
    admissible = {
        serialize(StallingsGraph(2, 2, triples)) for triples in enumerate_admissible_graphs(2, 2)
    }
    assert len(admissible) == 25
    rng = random.Random(35)
    counts = Counter(serialize(sample_graph_subgroup(2, 2, cache, rng)) for _ in range(25000))
    assert set(counts) == admissible
    for c in counts.values():
        assert 800 < c < 1200


def test_sampling_error(cache):
    # find a seed whose first draw is rejected, then starve the attempt cap
    for seed in range(1000):
        rng = random.Random(seed)
        try:
            sample_graph_subgroup(2, 4, cache, rng, max_attempts=1)
        except SamplingError as e:
            assert e.attempts == 1
            break
    else:
        pytest.fail("no rejecting seed found")
