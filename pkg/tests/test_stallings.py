from __future__ import annotations

import json
import random

import pytest

from freegroups.stallings import (
    LabeledCore,
    PreGraph,
    StallingsGraph,
    conjugate,
    cyclic_core,
    fold,
    fold_pregraph,
    is_admissible,
    isomorphic,
    membership,
    parse,
    rank,
    reduced_rank,
    serialize,
)
from freegroups.words import invert, random_reduced_word
from oracles import (
    enumerate_admissible_graphs,
    reduced_words,
    step_table,
    trace_word,
)


def test_fold_known_graphs():
    assert (
        serialize(fold(["ab", "ba"], 2))
        == '{"r":2,"n":3,"base":1,"edges":{"a":[[1,2],[3,1]],"b":[[1,3],[2,1]]}}'
    )
    assert (
        serialize(fold(["a", "baB"], 2))
        == '{"r":2,"n":2,"base":1,"edges":{"a":[[1,1],[2,2]],"b":[[1,2]]}}'
    )
    assert serialize(fold([], 2)) == '{"r":2,"n":1,"base":1,"edges":{"a":[],"b":[]}}'
    assert serialize(fold(["aa"], 2)) == '{"r":2,"n":2,"base":1,"edges":{"a":[[1,2],[2,1]],"b":[]}}'
    # tuple input and string input agree
    assert fold([(1, 2), (2, 1)], 2) == fold(["ab", "ba"], 2)


def test_fold_collapses_redundant_generators():
    assert fold(["a", "a"], 2) == fold(["a"], 2)
    assert fold(["ab", "ab"], 2) == fold(["ab"], 2)
    assert fold(["a", "A"], 2) == fold(["a"], 2)
    # full basis gives the one-vertex rose
    rose = fold(["a", "b"], 2)
    assert rose.n == 1 and rank(rose) == 2


def test_fold_order_independence():
    rng = random.Random(21)
    for _ in range(500):
        k = rng.randrange(1, 5)
        words = [random_reduced_word(2, 8, rng) for _ in range(k)]
        base = serialize(fold(words, 2))
        shuffled = words[:]
        rng.shuffle(shuffled)
        assert serialize(fold(shuffled, 2)) == base
        # replacing a generator by its inverse fixes the subgroup
        flipped = [invert(w) if rng.random() < 0.5 else w for w in words]
        assert serialize(fold(flipped, 2)) == base


def test_fold_rejects_bad_input():
    with pytest.raises(ValueError):
        fold(["aA"], 2)
    with pytest.raises(ValueError):
        fold(["ac"], 2)
    with pytest.raises(ValueError):
        fold([(1, 0)], 2)


def test_constructor_invariants():
    with pytest.raises(ValueError, match="deterministic"):
        StallingsGraph(2, 3, [(1, 1, 2), (1, 1, 3), (2, 2, 1), (3, 2, 1)])
    with pytest.raises(ValueError, match="co-deterministic"):
        StallingsGraph(2, 3, [(2, 1, 1), (3, 1, 1), (1, 2, 2), (1, 1, 3)])
    with pytest.raises(ValueError, match="connected"):
        StallingsGraph(2, 3, [(1, 1, 1), (2, 2, 3), (3, 2, 2)])
    with pytest.raises(ValueError, match="leaf"):
        StallingsGraph(2, 2, [(1, 1, 2)])
    # base itself may be a leaf
    g = StallingsGraph(2, 2, [(1, 1, 2), (2, 2, 2)])
    assert g.degree(1) == 1
    # loops count twice toward degree
    assert g.degree(2) == 3


def test_trace_and_membership():
    g = fold(["ab", "ba"], 2)
    assert g.trace(()) == 1
    assert membership(g, ())
    assert membership(g, (1, 2))
    assert membership(g, (2, 1))
    assert membership(g, (1, 2, 2, 1))
    assert not membership(g, (1,))
    assert not membership(g, (1, 2, 1))
    assert g.trace((1,)) == 2
    assert g.trace((1, 1)) is None
    assert g.trace((2,), start=2) == 1


def test_membership_matches_oracle_exhaustively():
    words = reduced_words(2, 5)
    for n in (1, 2, 3):
        for triples in enumerate_admissible_graphs(2, n):
            g = StallingsGraph(2, n, triples)
            table = step_table(2, n, triples)
            for w in words:
                assert membership(g, w) == (trace_word(table, 1, w) == 1)


def test_rank():
    assert rank(fold([], 2)) == 0
    assert reduced_rank(fold([], 2)) == 0
    assert rank(fold(["a", "b"], 2)) == 2
    assert reduced_rank(fold(["a", "b"], 2)) == 1
    assert rank(fold(["ab", "ba"], 2)) == 2
    rng = random.Random(22)
    for _ in range(50):
        words = [random_reduced_word(2, 10, rng) for _ in range(3)]
        g = fold(words, 2)
        assert rank(g) == g.num_edges - g.n + 1
        assert rank(g) <= 3


def test_serialize_parse_roundtrip():
    rng = random.Random(23)
    for _ in range(100):
        words = [random_reduced_word(2, 9, rng) for _ in range(rng.randrange(1, 4))]
        g = fold(words, 2)
        assert parse(serialize(g)) == g
    data = json.loads(serialize(fold(["ab", "ba"], 2)))
    assert data["base"] == 1 and data["n"] == 3


def test_parse_rejections():
    with pytest.raises(ValueError):
        parse("not json")
    with pytest.raises(ValueError):
        parse('{"r":2,"n":1,"edges":{"a":[],"b":[]}}')  # missing base
    with pytest.raises(ValueError):
        parse('{"r":2,"n":2,"base":2,"edges":{"a":[[1,2],[2,1]],"b":[]}}')
    with pytest.raises(ValueError):
        parse('{"r":1,"n":1,"base":1,"edges":{"b":[[1,1]]}}')
    with pytest.raises(ValueError):
        parse('{"r":2,"n":2,"base":1,"edges":{"a":[[1,2],[1,1]],"b":[[2,2]]}}')


def test_cyclic_core():
    core = cyclic_core(fold(["abA"], 2))
    assert not core.is_empty
    assert core.n == 1 and core.edge_list() == [(1, 2, 1)]
    assert cyclic_core(fold([], 2)).is_empty
    assert cyclic_core(fold(["a"], 2)).edge_list() == [(1, 1, 1)]
    # the core never has a vertex of degree < 2
    rng = random.Random(24)
    for _ in range(50):
        words = [random_reduced_word(2, 8, rng) for _ in range(2)]
        core = cyclic_core(fold(words, 2))
        deg = {}
        for u, a, v in core.edge_list():
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        assert all(d >= 2 for d in deg.values())


def test_conjugate():
    assert conjugate(fold(["abA"], 2), fold(["b"], 2))
    assert conjugate(fold(["ab"], 2), fold(["ba"], 2))
    assert not conjugate(fold(["a"], 2), fold(["b"], 2))
    assert not conjugate(fold(["a"], 2), fold(["aa"], 2))
    assert conjugate(fold([], 2), fold([], 2))
    with pytest.raises(ValueError, match="alphabet"):
        conjugate(fold(["a"], 2), fold(["a"], 3))


def test_isomorphic():
    g = fold(["ab", "ba"], 2)
    assert isomorphic(g, g)
    # relabeling the non-base vertices keeps the rooted type
    swapped = StallingsGraph(2, 3, [(1, 1, 3), (2, 1, 1), (1, 2, 2), (3, 2, 1)])
    assert isomorphic(g, swapped)
    # <ab> and <ba>: same graph up to base choice only
    assert not isomorphic(fold(["ab"], 2), fold(["ba"], 2))
    assert isomorphic(fold(["ab"], 2), fold(["ba"], 2), rooted=False)
    assert not isomorphic(fold(["a"], 2), fold(["aa"], 2), rooted=False)
    assert isomorphic(fold([], 2), fold([], 2))


def test_fold_pregraph_direct():
    pg = PreGraph(2, 3)
    pg.add_edge(1, 1, 2)
    pg.add_edge(1, 1, 3)
    assert fold_pregraph(pg) == fold([], 2)
    pg = PreGraph(2, 2)
    pg.add_edge(1, 1, 2)
    pg.add_edge(2, 1, 1)
    assert fold_pregraph(pg) == fold(["aa"], 2)


def test_is_admissible():
    assert is_admissible(fold(["ab", "ba"], 2))
    pg = PreGraph(2, 2)
    pg.add_edge(1, 1, 2)
    assert not is_admissible(pg)
    pg2 = PreGraph(2, 2)
    pg2.add_edge(1, 1, 2)
    pg2.add_edge(1, 1, 2)
    assert not is_admissible(pg2)
