"""The two subgroup distributions.

Word-based: k independent uniform reduced words of length at most n,
with the genericity predicates (length gate, distinct prefixes, long
repeated factors) and the central/outer decomposition of the folded
graph.  Graph-based: one uniform partial injection per letter, accepted
when the induced A-graph is admissible; conditioned on acceptance this
is uniform over all size-n Stallings graphs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .partial_injections import CountCache, uniform_partial_injection
from .stallings import StallingsGraph, fold
from .words import check_letter, check_rank, invert, is_reduced, random_reduced_word


class SamplingError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""

    def __init__(self, attempts: int):
        super().__init__(f"no admissible graph after {attempts} attempts")
        self.attempts = attempts


@dataclass(frozen=True)
class GenericityParams:
    """Parameters for the genericity predicates; lambda is spelled lam.

    Valid when 0 < 2*lam < alpha < 1 and 0 < beta < 1.  The prefix
    length used by in_Y at word length bound n is ceil(lam*n).
    """

    alpha: float = 0.75
    lam: float = 0.125
    beta: float = 0.25

    def __post_init__(self):
        if not 0 < 2 * self.lam < self.alpha < 1:
            raise ValueError("genericity parameters need 0 < 2*lam < alpha < 1")
        if not 0 < self.beta < 1:
            raise ValueError("genericity parameter beta must lie in (0, 1)")

    def prefix_length(self, n: int) -> int:
        return math.ceil(self.lam * n)


@dataclass(frozen=True)
class WordTuple:
    """A k-tuple of reduced words of length at most n over rank r."""

    words: tuple
    r: int
    k: int
    n: int

    def __post_init__(self):
        check_rank(self.r)
        if self.k != len(self.words):
            raise ValueError(f"k = {self.k} but {len(self.words)} words given")
        if self.k < 1:
            raise ValueError("a word tuple holds at least one word")
        if self.n < 0:
            raise ValueError("length bound must be nonnegative")
        for w in self.words:
            if not isinstance(w, tuple):
                raise ValueError("words must be tuples of signed letters")
            for x in w:
                check_letter(x, self.r)
            if not is_reduced(w):
                raise ValueError("words in a tuple must be reduced")
            if len(w) > self.n:
                raise ValueError(f"word of length {len(w)} exceeds bound {self.n}")

    def graph(self) -> StallingsGraph:
        return fold(self.words, self.r)


def sample_word_tuple(r: int, k: int, n: int, rng) -> WordTuple:
    """k independent uniform draws from the reduced words of length <= n."""
    if k < 1:
        raise ValueError("k must be at least 1")
    words = tuple(random_reduced_word(r, n, rng) for _ in range(k))
    return WordTuple(words, r, k, n)


def in_Y(t: WordTuple, p: GenericityParams) -> bool:
    """Membership in Y_{alpha,lam,n,k}.

    Every word must be longer than alpha*n, and the 2k prefixes of
    length ceil(lam*n) of the words and their inverses must be pairwise
    distinct.
    """
    if any(len(w) <= p.alpha * t.n for w in t.words):
        return False
    mu = p.prefix_length(t.n)
    prefixes = set()
    for w in t.words:
        for u in (w, invert(w)):
            head = u[:mu]
            if head in prefixes:
                return False
            prefixes.add(head)
    return True


def has_repeated_long_factor(t: WordTuple, beta: float, n: int | None = None) -> bool:
    """Whether some factor of length >= beta*n occurs twice, up to inversion.

    Both occurrences may sit in one word (distinct positions) or in two
    different words; an occurrence of the inverse counts.  A repeated
    factor of length >= L exists iff one of length exactly L does, so
    only factors of the threshold length are scanned.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if n is None:
        n = t.n
    length = max(math.ceil(beta * n), 1)
    seen = {}
    for i, w in enumerate(t.words):
        for pos in range(len(w) - length + 1):
            v = w[pos : pos + length]
            key = min(v, invert(v))
            seen.setdefault(key, []).append((i, pos))
    return any(len(occ) >= 2 for occ in seen.values())


def central_outer_structure(t: WordTuple, p: GenericityParams) -> dict:
    """Split the folded graph into its central part and outer paths.

    Central vertices are those at distance <= ceil(lam*n) from the base.
    Reports the central vertex count, whether the central part is a tree
    (connected and acyclic), its number of degree-1 vertices, and the
    sorted edge counts of the outer components (incident edges included:
    an outer path attached at both ends to the central part of the graph
    of a tuple in Y contributes the length of its middle factor m_i).
    """
    if not in_Y(t, p):
        raise ValueError("tuple is not in Y for these genericity parameters")
    g = t.graph()
    mu = p.prefix_length(t.n)

    dist = [-1] * (g.n + 1)
    dist[1] = 0
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for a in range(1, g.r + 1):
            for nb in (g.fwd[a][u], g.bwd[a][u]):
                if nb and dist[nb] < 0:
                    dist[nb] = dist[u] + 1
                    queue.append(nb)
    central = [v for v in range(1, g.n + 1) if dist[v] <= mu]
    is_central = [False] * (g.n + 1)
    for v in central:
        is_central[v] = True

    central_edges = 0
    degree = dict.fromkeys(central, 0)
    outer_parent = {v: v for v in range(1, g.n + 1) if not is_central[v]}

    def find(x):
        while outer_parent[x] != x:
            outer_parent[x] = outer_parent[outer_parent[x]]
            x = outer_parent[x]
        return x

    outer_edges = {}
    for u, a, v in g.edge_list():
        if is_central[u] and is_central[v]:
            central_edges += 1
            degree[u] += 1
            degree[v] += 1
        elif not is_central[u] and not is_central[v]:
            outer_parent[find(u)] = find(v)
            outer_edges.setdefault(u, []).append((u, a, v))
        else:
            anchor = v if is_central[u] else u
            outer_edges.setdefault(anchor, []).append((u, a, v))

    counts = {}
    for anchor, edges in outer_edges.items():
        root = find(anchor)
        counts[root] = counts.get(root, 0) + len(edges)

    seen = {1}
    queue = deque([1])
    while queue:
        u = queue.popleft()
        for a in range(1, g.r + 1):
            for nb in (g.fwd[a][u], g.bwd[a][u]):
                if nb and is_central[nb] and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
    connected = len(seen) == len(central)

    return {
        "tree_vertices": len(central),
        "tree_is_tree": connected and central_edges == len(central) - 1,
        "outer_loop_lengths": sorted(counts.values()),
        "leaves": sum(1 for v in central if degree[v] == 1),
    }


def sample_graph_subgroup(
    r: int, n: int, cache: CountCache, rng, max_attempts: int = 1000
) -> StallingsGraph:
    """Uniform size-n Stallings graph by rejection.

    Draw one uniform partial injection on {1..n} per letter and accept
    iff the induced A-graph is connected with no non-base leaf; the
    result keeps the drawn vertex numbering, so accepted outputs are
    exactly uniform.  Acceptance tends to 1 as n grows; the attempt cap
    guards tiny-n pathologies.
    """
    check_rank(r)
    if r < 2:
        raise ValueError("graph sampling needs alphabet rank at least 2")
    if n < 1:
        raise ValueError("vertex count must be at least 1")
    for _ in range(max_attempts):
        maps = [None] + [uniform_partial_injection(n, cache, rng).map for _ in range(r)]
        if _admissible_maps(r, n, maps):
            triples = [
                (u, a, maps[a][u]) for a in range(1, r + 1) for u in range(1, n + 1) if maps[a][u]
            ]
            return StallingsGraph(r, n, triples)
    raise SamplingError(max_attempts)


def _admissible_maps(r: int, n: int, maps) -> bool:
    degree = [0] * (n + 1)
    adjacency = [[] for _ in range(n + 1)]
    for a in range(1, r + 1):
        col = maps[a]
        for u in range(1, n + 1):
            v = col[u]
            if v:
                degree[u] += 1
                degree[v] += 1
                adjacency[u].append(v)
                adjacency[v].append(u)
    if any(degree[v] <= 1 for v in range(2, n + 1)):
        return False
    seen = bytearray(n + 1)
    seen[1] = 1
    queue = deque([1])
    reached = 1
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if not seen[w]:
                seen[w] = 1
                reached += 1
                queue.append(w)
    return reached == n
