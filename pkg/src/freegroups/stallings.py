"""Stallings graphs of finitely generated subgroups of free groups.

A subgroup H of F(A) is represented by a finite rooted labeled graph:
vertices {1..n} with base vertex 1, and for each letter of A a partial
injection on the vertices (determinism and co-determinism).  The graph
of H = <g1,...,gk> is obtained by folding a wedge of loops spelling the
generators.  Membership, rank, conjugacy and isomorphism are then plain
graph walks.

Words are tuples of nonzero ints as in the words module; every function
that takes a word also accepts its text form ("abA").
"""

from __future__ import annotations

import json
from collections import deque

from .words import (
    Word,
    check_rank,
    check_letter,
    format_word,
    is_reduced,
    parse_word,
)


def _as_word(w, r: int) -> Word:
    if isinstance(w, str):
        return parse_word(w, r)
    word = tuple(w)
    for x in word:
        check_letter(x, r)
    if not is_reduced(word):
        raise ValueError(f"word {format_word(word)!r} is not reduced")
    return word


class StallingsGraph:
    """Admissible based labeled graph; immutable once constructed.

    Storage is one pair of arrays per letter: fwd[a][u] is the target of
    the a-edge leaving u (0 if absent), bwd[a][v] its inverse.  The
    constructor enforces admissibility and raises ValueError naming the
    violated invariant, so every live instance is a genuine Stallings
    graph with base vertex 1.
    """

    __slots__ = ("r", "n", "fwd", "bwd")
    base = 1

    def __init__(self, r: int, n: int, triples):
        check_rank(r)
        if not isinstance(n, int) or n < 1:
            raise ValueError("vertex count must be a positive integer")
        fwd = [None] + [[0] * (n + 1) for _ in range(r)]
        bwd = [None] + [[0] * (n + 1) for _ in range(r)]
        for u, a, v in triples:
            if not (isinstance(a, int) and 1 <= a <= r):
                raise ValueError(f"edge label {a!r} outside alphabet of rank {r}")
            name = chr(96 + a)
            if not (isinstance(u, int) and 1 <= u <= n):
                raise ValueError(f"edge source {u!r} outside vertex range 1..{n}")
            if not (isinstance(v, int) and 1 <= v <= n):
                raise ValueError(f"edge target {v!r} outside vertex range 1..{n}")
            if fwd[a][u]:
                raise ValueError(f"not deterministic: two {name}-edges leave vertex {u}")
            if bwd[a][v]:
                raise ValueError(f"not co-deterministic: two {name}-edges enter vertex {v}")
            fwd[a][u] = v
            bwd[a][v] = u
        self.r = r
        self.n = n
        self.fwd = fwd
        self.bwd = bwd
        seen = self._component(1)
        if len(seen) != n:
            raise ValueError("graph is not connected")
        for v in range(2, n + 1):
            if self.degree(v) <= 1:
                raise ValueError(f"vertex {v} is a leaf (non-base vertices need degree >= 2)")

    def _component(self, start: int) -> set:
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for a in range(1, self.r + 1):
                for nb in (self.fwd[a][u], self.bwd[a][u]):
                    if nb and nb not in seen:
                        seen.add(nb)
                        queue.append(nb)
        return seen

    def degree(self, v: int) -> int:
        # a loop at v is counted twice, once per endpoint
        return sum(1 for a in range(1, self.r + 1) if self.fwd[a][v]) + sum(
            1 for a in range(1, self.r + 1) if self.bwd[a][v]
        )

    @property
    def num_edges(self) -> int:
        return sum(sum(1 for v in col[1:] if v) for col in self.fwd[1:])

    def edge_list(self) -> list:
        """All edges as (source, letter, target), sorted."""
        out = []
        for u in range(1, self.n + 1):
            for a in range(1, self.r + 1):
                if self.fwd[a][u]:
                    out.append((u, a, self.fwd[a][u]))
        return out

    def step(self, v: int, x: int) -> int:
        """Follow the signed letter x from v; 0 when the edge is absent."""
        return self.fwd[x][v] if x > 0 else self.bwd[-x][v]

    def trace(self, w, start: int = 1):
        """Endpoint of the path labeled w from start, or None if it leaves the graph."""
        v = start
        for x in _as_word(w, self.r):
            v = self.step(v, x)
            if not v:
                return None
        return v

    def __eq__(self, other):
        return (
            isinstance(other, StallingsGraph)
            and self.r == other.r
            and self.n == other.n
            and self.fwd == other.fwd
        )

    def __hash__(self):
        return hash((self.r, self.n, tuple(tuple(col) for col in self.fwd[1:])))

    def __repr__(self):
        return f"StallingsGraph(r={self.r}, n={self.n}, edges={self.edge_list()})"


class PreGraph:
    """Labeled graph with no admissibility promises.

    The folding intermediate: letter relations may be multi-valued, the
    graph may be disconnected or have leaves.  Stable vertex ids 1..n.
    """

    __slots__ = ("r", "n", "edges")

    def __init__(self, r: int, n: int, triples=()):
        check_rank(r)
        if not isinstance(n, int) or n < 1:
            raise ValueError("vertex count must be a positive integer")
        self.r = r
        self.n = n
        self.edges = []
        for u, a, v in triples:
            self.add_edge(u, a, v)

    def add_edge(self, u: int, a: int, v: int):
        if not (1 <= a <= self.r):
            raise ValueError(f"edge label {a!r} outside alphabet of rank {self.r}")
        if not (1 <= u <= self.n and 1 <= v <= self.n):
            raise ValueError(f"edge ({u},{v}) outside vertex range 1..{self.n}")
        self.edges.append((u, a, v))

    def edge_list(self) -> list:
        return sorted(self.edges)


class LabeledCore:
    """Leafless labeled graph without a base vertex; may be empty.

    Vertices are {1..n} with n possibly 0.  Same determinism and
    co-determinism invariants as StallingsGraph.
    """

    __slots__ = ("r", "n", "fwd", "bwd")

    def __init__(self, r: int, n: int, triples):
        check_rank(r)
        if not isinstance(n, int) or n < 0:
            raise ValueError("vertex count must be a nonnegative integer")
        fwd = [None] + [[0] * (n + 1) for _ in range(r)]
        bwd = [None] + [[0] * (n + 1) for _ in range(r)]
        for u, a, v in triples:
            if not (1 <= a <= r and 1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u},{a},{v}) out of range")
            if fwd[a][u] or bwd[a][v]:
                raise ValueError("core is not deterministic and co-deterministic")
            fwd[a][u] = v
            bwd[a][v] = u
        self.r = r
        self.n = n
        self.fwd = fwd
        self.bwd = bwd
        for v in range(1, n + 1):
            deg = sum(1 for a in range(1, r + 1) if fwd[a][v]) + sum(
                1 for a in range(1, r + 1) if bwd[a][v]
            )
            if deg <= 1:
                raise ValueError(f"core vertex {v} is a leaf")

    @property
    def is_empty(self) -> bool:
        return self.n == 0

    @property
    def num_edges(self) -> int:
        return sum(sum(1 for v in col[1:] if v) for col in self.fwd[1:])

    def edge_list(self) -> list:
        out = []
        for u in range(1, self.n + 1):
            for a in range(1, self.r + 1):
                if self.fwd[a][u]:
                    out.append((u, a, self.fwd[a][u]))
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LabeledCore)
            and self.r == other.r
            and self.n == other.n
            and self.fwd == other.fwd
        )

    def __hash__(self):
        return hash((self.r, self.n, tuple(tuple(col) for col in self.fwd[1:])))

    def __repr__(self):
        return f"LabeledCore(r={self.r}, n={self.n}, edges={self.edge_list()})"


def fold(generators, r: int) -> StallingsGraph:
    """Stallings graph of the subgroup generated by the given reduced words.

    Builds the wedge of generator loops at vertex 1 and folds it with a
    union-find over vertex classes; conflicting edge pairs go on a work
    stack until none remain.  Leaves are then trimmed (a no-op for
    typical reduced input, but it makes admissibility unconditional) and
    vertices renumbered breadth-first from the base, so equal subgroups
    serialize identically.  Generator order does not matter.
    """
    check_rank(r)
    words = [_as_word(w, r) for w in generators]
    wedge = PreGraph(r, 1 + sum(max(len(w) - 1, 0) for w in words))
    nv = 1
    for w in words:
        if not w:
            continue
        path = [1] + list(range(nv + 1, nv + len(w))) + [1]
        nv += len(w) - 1
        for i, x in enumerate(w):
            if x > 0:
                wedge.add_edge(path[i], x, path[i + 1])
            else:
                wedge.add_edge(path[i + 1], -x, path[i])
    return fold_pregraph(wedge, base=1)


def fold_pregraph(g: PreGraph, base: int = 1) -> StallingsGraph:
    """Fold an arbitrary PreGraph whose base component is the whole graph."""
    parent = list(range(g.n + 1))
    size = [1] * (g.n + 1)
    out = [dict() for _ in range(g.n + 1)]
    inn = [dict() for _ in range(g.n + 1)]

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def merge(x: int, y: int):
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            x = find(x)
            y = find(y)
            if x == y:
                continue
            if size[x] < size[y]:
                x, y = y, x
            parent[y] = x
            size[x] += size[y]
            small, out[y] = out[y], None
            big = out[x]
            for a, t in small.items():
                if a in big:
                    stack.append((big[a], t))
                else:
                    big[a] = t
            small, inn[y] = inn[y], None
            big = inn[x]
            for a, s in small.items():
                if a in big:
                    stack.append((big[a], s))
                else:
                    big[a] = s

    for u, a, v in g.edges:
        ru = find(u)
        rv = find(v)
        t = out[ru].get(a)
        if t is not None:
            merge(t, rv)
            continue
        s = inn[rv].get(a)
        if s is not None:
            merge(s, ru)
            continue
        out[ru][a] = rv
        inn[rv][a] = ru

    folded = []
    for u in range(1, g.n + 1):
        if find(u) != u:
            continue
        for a, t in out[u].items():
            folded.append((u, a, find(t)))
    return _assemble(g.r, folded, find(base))


def _trim_leaves(triples, keep=None):
    """Iteratively delete degree <= 1 vertices, sparing `keep` if given.

    Returns (alive vertex set, alive triples list).  A loop contributes
    2 to the degree of its vertex.
    """
    ids = set()
    for u, a, v in triples:
        ids.add(u)
        ids.add(v)
    if keep is not None:
        ids.add(keep)
    deg = dict.fromkeys(ids, 0)
    incident = {i: [] for i in ids}
    alive_e = [True] * len(triples)
    for idx, (u, a, v) in enumerate(triples):
        deg[u] += 1
        deg[v] += 1
        incident[u].append(idx)
        if v != u:
            incident[v].append(idx)
    alive_v = dict.fromkeys(ids, True)
    queue = [i for i in ids if i != keep and deg[i] <= 1]
    while queue:
        x = queue.pop()
        if not alive_v[x] or x == keep or deg[x] > 1:
            continue
        alive_v[x] = False
        for idx in incident[x]:
            if not alive_e[idx]:
                continue
            alive_e[idx] = False
            u, a, v = triples[idx]
            other = v if u == x else u
            deg[x] -= 1
            deg[other] -= 1
            if other != x and alive_v[other] and other != keep and deg[other] <= 1:
                queue.append(other)
    vertices = {i for i in ids if alive_v[i]}
    kept = [triples[idx] for idx in range(len(triples)) if alive_e[idx]]
    return vertices, kept


def _assemble(r: int, triples, base) -> StallingsGraph:
    """Trim non-base leaves, renumber breadth-first from base, construct.

    Breadth-first exploration takes letters in increasing order, the
    outgoing edge before the incoming one; this fixes the canonical
    numbering used throughout.
    """
    vertices, kept = _trim_leaves(triples, keep=base)
    fwd = {}
    bwd = {}
    for u, a, v in kept:
        fwd[u, a] = v
        bwd[v, a] = u
    number = {base: 1}
    order = deque([base])
    while order:
        u = order.popleft()
        for a in range(1, r + 1):
            for nb in (fwd.get((u, a)), bwd.get((u, a))):
                if nb is not None and nb not in number:
                    number[nb] = len(number) + 1
                    order.append(nb)
    if len(number) != len(vertices):
        raise ValueError("graph is not connected")
    return StallingsGraph(r, len(number), [(number[u], a, number[v]) for u, a, v in kept])


def is_admissible(g, base: int = 1) -> bool:
    """Deterministic, co-deterministic, connected, and no leaf besides base."""
    triples = g.edge_list()
    if not (1 <= base <= g.n):
        return False
    seen_out = set()
    seen_in = set()
    deg = dict.fromkeys(range(1, g.n + 1), 0)
    adj = {i: set() for i in range(1, g.n + 1)}
    for u, a, v in triples:
        if (u, a) in seen_out or (a, v) in seen_in:
            return False
        seen_out.add((u, a))
        seen_in.add((a, v))
        deg[u] += 1
        deg[v] += 1
        adj[u].add(v)
        adj[v].add(u)
    if any(deg[v] <= 1 for v in range(1, g.n + 1) if v != base):
        return False
    reach = {base}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in reach:
                reach.add(w)
                queue.append(w)
    return len(reach) == g.n


def membership(g: StallingsGraph, w) -> bool:
    """True iff the reduced word w labels a loop at the base vertex."""
    return g.trace(w) == 1


def rank(g: StallingsGraph) -> int:
    return g.num_edges - g.n + 1


def reduced_rank(g: StallingsGraph) -> int:
    return max(0, rank(g) - 1)


def cyclic_core(g: StallingsGraph) -> LabeledCore:
    """Delete leaves repeatedly, base included; empty iff H is trivial."""
    vertices, kept = _trim_leaves(g.edge_list(), keep=None)
    number = {v: i for i, v in enumerate(sorted(vertices), start=1)}
    return LabeledCore(g.r, len(vertices), [(number[u], a, number[v]) for u, a, v in kept])


def conjugate(g1: StallingsGraph, g2: StallingsGraph) -> bool:
    """Whether the two subgroups are conjugate: their cyclic cores match."""
    if g1.r != g2.r:
        raise ValueError(f"alphabet mismatch: rank {g1.r} vs rank {g2.r}")
    return isomorphic(cyclic_core(g1), cyclic_core(g2), rooted=False)


def isomorphic(g1, g2, rooted: bool = True) -> bool:
    """Label-preserving isomorphism of deterministic co-deterministic graphs.

    Rooted: the only candidate map sends vertex 1 to vertex 1; propagate
    it breadth-first and accept iff it is total and bijective.  Unrooted:
    anchor vertex 1 of g1 against every vertex of g2.  Inputs must be
    connected (or empty, for cores).
    """
    if g1.r != g2.r or g1.n != g2.n or g1.num_edges != g2.num_edges:
        return False
    if g1.n == 0:
        return True
    if rooted:
        return _propagate(g1, g2, 1, 1)
    return any(_propagate(g1, g2, 1, v) for v in range(1, g2.n + 1))


def _propagate(g1, g2, a1: int, a2: int) -> bool:
    fwd1, bwd1, fwd2, bwd2 = g1.fwd, g1.bwd, g2.fwd, g2.bwd
    image = {a1: a2}
    used = {a2}
    queue = deque([a1])
    while queue:
        u = queue.popleft()
        mu = image[u]
        for a in range(1, g1.r + 1):
            for v, w in ((fwd1[a][u], fwd2[a][mu]), (bwd1[a][u], bwd2[a][mu])):
                if (v == 0) != (w == 0):
                    return False
                if not v:
                    continue
                seen = image.get(v)
                if seen is not None:
                    if seen != w:
                        return False
                elif w in used:
                    return False
                else:
                    image[v] = w
                    used.add(w)
                    queue.append(v)
    return len(image) == g1.n


def serialize(g: StallingsGraph) -> str:
    """Canonical one-line JSON form; see parse for the inverse."""
    edges = {}
    for a in range(1, g.r + 1):
        edges[chr(96 + a)] = [[u, g.fwd[a][u]] for u in range(1, g.n + 1) if g.fwd[a][u]]
    return json.dumps({"r": g.r, "n": g.n, "base": 1, "edges": edges}, separators=(",", ":"))


def parse(text: str) -> StallingsGraph:
    """Parse the serialized form, rejecting non-admissible graphs.

    Diagnostics name the violated invariant (determinism, co-determinism,
    connectivity, leaf, range).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid graph text: {exc}") from None
    if not isinstance(obj, dict):
        raise ValueError("graph text must be a JSON object")
    missing = {"r", "n", "base", "edges"} - obj.keys()
    if missing:
        raise ValueError(f"graph object is missing fields {sorted(missing)}")
    r, n, base, edges = obj["r"], obj["n"], obj["base"], obj["edges"]
    check_rank(r)
    if not isinstance(n, int) or n < 1:
        raise ValueError("field n must be a positive integer")
    if base != 1:
        raise ValueError("base vertex must be 1")
    if not isinstance(edges, dict):
        raise ValueError("field edges must be an object keyed by letters")
    alphabet = {chr(96 + a): a for a in range(1, r + 1)}
    triples = []
    for name, pairs in edges.items():
        if name not in alphabet:
            raise ValueError(f"edge label {name!r} outside alphabet of rank {r}")
        for pair in pairs:
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ValueError(f"malformed edge pair {pair!r} under label {name!r}")
            triples.append((pair[0], alphabet[name], pair[1]))
    return StallingsGraph(r, n, triples)
