"""Decision procedures on Stallings graphs.

Malnormality, a bounded purity test, generator-conjugate avoidance, a
sufficient triviality test for the normal closure, intersections, and
the Hanna Neumann quantities.  Everything runs on the product of two
graphs (or of a graph with itself): vertices are pairs, transitions act
componentwise, and the questions become component arithmetic, done here
with scipy's sparse connected components.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .partial_injections import PartialInjection
from .stallings import StallingsGraph, _assemble, rank, reduced_rank
from .words import Word


class PairGraph:
    """Product of two Stallings graphs with componentwise transitions.

    The pair (u, v) is flattened to index (u-1)*n2 + (v-1).  With
    diagonal_excluded (square products only), diagonal pairs carry no
    edges; injectivity of the letter maps keeps transitions off the
    diagonal, which is asserted during construction.
    """

    def __init__(self, g1: StallingsGraph, g2: StallingsGraph, diagonal_excluded: bool = False):
        if g1.r != g2.r:
            raise ValueError(f"alphabet mismatch: rank {g1.r} vs rank {g2.r}")
        if diagonal_excluded and g1.n != g2.n:
            raise ValueError("diagonal exclusion needs a square product")
        self.r = g1.r
        self.n1 = g1.n
        self.n2 = g2.n
        self.diagonal_excluded = diagonal_excluded
        self.edges = [None]
        self._labels = None
        n1, n2 = self.n1, self.n2
        for a in range(1, self.r + 1):
            f1 = np.asarray(g1.fwd[a][1:], dtype=np.int64)
            f2 = np.asarray(g2.fwd[a][1:], dtype=np.int64)
            ok = (f1[:, None] > 0) & (f2[None, :] > 0)
            if diagonal_excluded:
                ok &= ~np.eye(n1, dtype=bool)
            src = np.flatnonzero(ok)
            dst = (f1[src // n2] - 1) * n2 + (f2[src % n2] - 1)
            if diagonal_excluded:
                assert not np.any(dst // n2 == dst % n2), "transition reached the diagonal"
            self.edges.append((src, dst))

    @property
    def num_vertices(self) -> int:
        total = self.n1 * self.n2
        return total - self.n1 if self.diagonal_excluded else total

    @property
    def num_edges(self) -> int:
        return sum(src.size for src, _ in self.edges[1:])

    def index(self, u: int, v: int) -> int:
        return (u - 1) * self.n2 + (v - 1)

    def pair(self, idx: int) -> tuple:
        return idx // self.n2 + 1, idx % self.n2 + 1

    def component_labels(self) -> np.ndarray:
        """Connected component label per pair index (undirected)."""
        if self._labels is None:
            total = self.n1 * self.n2
            srcs = [src for src, _ in self.edges[1:] if src.size]
            dsts = [dst for _, dst in self.edges[1:] if dst.size]
            if srcs:
                rows = np.concatenate(srcs)
                cols = np.concatenate(dsts)
                matrix = coo_matrix(
                    (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(total, total)
                )
            else:
                matrix = coo_matrix((total, total), dtype=np.int8)
            _, self._labels = connected_components(matrix, directed=False)
        return self._labels

    def edge_triples(self) -> list:
        """All edges as ((u1,u2), letter, (v1,v2)); for small graphs."""
        out = []
        for a in range(1, self.r + 1):
            src, dst = self.edges[a]
            for s, d in zip(src.tolist(), dst.tolist()):
                out.append((self.pair(s), a, self.pair(d)))
        return out


def product_graph(g1: StallingsGraph, g2: StallingsGraph, diagonal_excluded: bool = False) -> PairGraph:
    """Full product on all n1*n2 pairs with componentwise transitions."""
    return PairGraph(g1, g2, diagonal_excluded)


@dataclass
class MalnormalityReport:
    malnormal: bool
    witness: tuple | None  # ((x, y), word) with the word looping at both


def is_malnormal(g: StallingsGraph, witness: bool = True) -> MalnormalityReport:
    """Malnormality via the diagonal-excluded product of g with itself.

    The subgroup is malnormal iff every component of that product is a
    tree.  On failure (and witness=True) a fundamental cycle of some
    non-tree component yields a cyclically reduced word that labels
    loops at two distinct vertices.
    """
    pg = product_graph(g, g, diagonal_excluded=True)
    if pg.num_edges == 0:
        return MalnormalityReport(True, None)
    labels = pg.component_labels()
    ncomp = int(labels.max()) + 1
    idx = np.arange(g.n * g.n)
    off = idx[idx // g.n != idx % g.n]
    vcount = np.bincount(labels[off], minlength=ncomp)
    srcs = np.concatenate([src for src, _ in pg.edges[1:] if src.size])
    ecount = np.bincount(labels[srcs], minlength=ncomp)
    bad = np.flatnonzero((vcount > 0) & (ecount >= vcount))
    if bad.size == 0:
        return MalnormalityReport(True, None)
    if not witness:
        return MalnormalityReport(False, None)
    return MalnormalityReport(False, _component_cycle(pg, labels, int(bad[0])))


def _component_cycle(pg: PairGraph, labels: np.ndarray, comp: int) -> tuple:
    """Fundamental cycle of a non-tree component: ((x, y), cycle word)."""
    items = []
    for a in range(1, pg.r + 1):
        src, dst = pg.edges[a]
        for j in np.flatnonzero(labels[src] == comp).tolist():
            items.append((int(src[j]), int(dst[j]), a))
    adjacency = {}
    for e, (u, v, a) in enumerate(items):
        adjacency.setdefault(u, []).append((e, v, a))
        if v != u:
            adjacency.setdefault(v, []).append((e, u, -a))
    root = min(adjacency)
    parent = {root: None}
    tree = set()
    spare = None
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for e, w, s in adjacency[u]:
            if w not in parent:
                parent[w] = (u, s)
                tree.add(e)
                queue.append(w)
            elif spare is None and e not in tree:
                spare = (u, w, s)
    assert spare is not None, "non-tree component without a spare edge"
    u, w, s = spare

    def chain(x):
        nodes = [x]
        letters = []
        while parent[x] is not None:
            x, letter = parent[x]
            nodes.append(x)
            letters.append(letter)
        nodes.reverse()
        letters.reverse()
        return nodes, letters

    nodes_u, letters_u = chain(u)
    nodes_w, letters_w = chain(w)
    common = 0
    for x, y in zip(nodes_u, nodes_w):
        if x != y:
            break
        common += 1
    word = (
        tuple(letters_u[common - 1 :])
        + (s,)
        + tuple(-x for x in reversed(letters_w[common - 1 :]))
    )
    return pg.pair(nodes_u[common - 1]), word


@dataclass
class NonPure:
    """Impurity witness: witness_word labels a path orbit[i] -> orbit[i+1 mod d]."""

    witness_word: Word
    orbit: list
    period: int


@dataclass
class PureUpTo:
    """No impurity witness of period <= d_max found; not a purity certificate."""

    d_max: int


def purity_status(g: StallingsGraph, d_max: int = 2):
    """Two-phase impurity search.

    Phase 1 is exact for single-letter witnesses of every period: a
    cycle of length d >= 2 in some letter's partial injection means that
    letter's d-th power loops where the letter itself does not.  Phase 2
    is complete for periods up to d_max: it looks for a path from some
    tuple of pairwise-distinct vertices to its cyclic shift in the
    d-fold product; any such path label is a witness.
    """
    if d_max < 2:
        raise ValueError("d_max must be at least 2")
    for a in range(1, g.r + 1):
        letter_map = PartialInjection(
            g.n, [(u, g.fwd[a][u]) for u in range(1, g.n + 1) if g.fwd[a][u]]
        )
        for cycle in letter_map.decompose().cycles:
            if len(cycle) >= 2:
                return NonPure((a,), cycle, len(cycle))
    for d in range(2, d_max + 1):
        found = _shift_witness(g, d)
        if found is not None:
            return found
    return PureUpTo(d_max)


def _shift_witness(g: StallingsGraph, d: int):
    """Search the d-fold product for a tuple joined to its cyclic shift.

    Distinct-entry tuples are closed under transitions (injectivity), so
    component labels over the full [n]^d index space never mix them with
    degenerate tuples; a tuple sharing its component with its shift is
    reachable from it, and any simple path between them carries a
    reduced label.
    """
    n = g.n
    if n < d:
        return None
    total = n**d
    idx = np.arange(total)
    coords = [(idx // n ** (d - 1 - i)) % n for i in range(d)]
    srcs, dsts = [], []
    for a in range(1, g.r + 1):
        f = np.asarray(g.fwd[a][1:], dtype=np.int64)
        ok = f[coords[0]] > 0
        for i in range(1, d):
            ok &= f[coords[i]] > 0
        src = np.flatnonzero(ok)
        dst = np.zeros(src.size, dtype=np.int64)
        for i in range(d):
            dst = dst * n + (f[coords[i][src]] - 1)
        srcs.append(src)
        dsts.append(dst)
    if not any(src.size for src in srcs):
        return None
    rows = np.concatenate(srcs)
    cols = np.concatenate(dsts)
    matrix = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(total, total))
    _, labels = connected_components(matrix, directed=False)
    distinct = np.ones(total, dtype=bool)
    for i in range(d):
        for j in range(i + 1, d):
            distinct &= coords[i] != coords[j]
    shifted = (idx % n ** (d - 1)) * n + idx // n ** (d - 1)
    hits = np.flatnonzero(distinct & (labels == labels[shifted]))
    if hits.size == 0:
        return None
    start = int(hits[0])
    orbit = tuple(int(coords[i][start]) + 1 for i in range(d))
    word = _tuple_path(g, orbit, orbit[1:] + orbit[:1])
    return NonPure(word, list(orbit), d)


def _tuple_path(g: StallingsGraph, start: tuple, goal: tuple) -> Word:
    signed = list(range(1, g.r + 1)) + list(range(-1, -g.r - 1, -1))
    parent = {start: None}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        if t == goal:
            word = []
            while parent[t] is not None:
                t, s = parent[t]
                word.append(s)
            return tuple(reversed(word))
        for s in signed:
            nxt = tuple(g.step(x, s) for x in t)
            if 0 in nxt or nxt in parent:
                continue
            parent[nxt] = (t, s)
            queue.append(nxt)
    raise AssertionError("shift tuple not reachable despite shared component")


def avoids_generator_conjugates(g: StallingsGraph) -> bool:
    """True iff no letter labels a loop, i.e. H misses every conjugate of a letter."""
    return all(
        g.fwd[a][v] != v for a in range(1, g.r + 1) for v in range(1, g.n + 1)
    )


@dataclass
class ClosureReport:
    verdict: str  # "ProvablyTrivial" or "Unknown"
    per_letter_gcd: list  # None where the letter has no cycle


def normal_closure_trivial_sufficient(g: StallingsGraph) -> ClosureReport:
    """Sufficient test that the group presented by the graph is trivial.

    When the cycle lengths of every letter's partial injection are
    coprime, each letter lies in the normal closure of H and the
    presented group collapses.  The converse fails, so the other verdict
    is Unknown, never "provably nontrivial".
    """
    gcds = []
    for a in range(1, g.r + 1):
        letter_map = PartialInjection(
            g.n, [(u, g.fwd[a][u]) for u in range(1, g.n + 1) if g.fwd[a][u]]
        )
        gcds.append(letter_map.cycle_length_gcd())
    verdict = "ProvablyTrivial" if all(x == 1 for x in gcds) else "Unknown"
    return ClosureReport(verdict, gcds)


def intersection(g1: StallingsGraph, g2: StallingsGraph) -> StallingsGraph:
    """Stallings graph of the intersection of the two subgroups.

    Component of (1,1) in the product graph, trimmed and renumbered.
    """
    pg = product_graph(g1, g2)
    labels = pg.component_labels()
    return _component_graph(pg, labels, int(labels[0]))


def _component_graph(pg: PairGraph, labels: np.ndarray, comp: int) -> StallingsGraph:
    triples = []
    for a in range(1, pg.r + 1):
        src, dst = pg.edges[a]
        if src.size:
            keep = labels[src] == comp
            for u, v in zip(src[keep].tolist(), dst[keep].tolist()):
                triples.append((u, a, v))
    return _assemble(pg.r, triples, 0)


@dataclass
class HncReport:
    chi_delta1: int
    chi_delta2: int
    rr_H: int
    rr_K: int
    rank_intersection: int
    hnc_ok: bool
    shnc_ok: bool


def hnc_report(g1: StallingsGraph, g2: StallingsGraph) -> HncReport:
    """Euler characteristics of the product against the rank bound.

    chi_delta1 is edges minus vertices of the raw (1,1) component (-1
    for a tree); chi_delta2 sums edges minus vertices over all non-tree
    components, 0 when there are none.  Both are compared with the
    product of the reduced ranks.
    """
    pg = product_graph(g1, g2)
    labels = pg.component_labels()
    ncomp = int(labels.max()) + 1
    vcount = np.bincount(labels, minlength=ncomp)
    srcs = [src for src, _ in pg.edges[1:] if src.size]
    if srcs:
        ecount = np.bincount(labels[np.concatenate(srcs)], minlength=ncomp)
    else:
        ecount = np.zeros(ncomp, dtype=np.int64)
    chi = ecount.astype(np.int64) - vcount
    comp0 = int(labels[0])
    chi_delta1 = int(chi[comp0])
    chi_delta2 = int(chi[chi >= 0].sum())
    rr_h = reduced_rank(g1)
    rr_k = reduced_rank(g2)
    inter = _component_graph(pg, labels, comp0)
    return HncReport(
        chi_delta1=chi_delta1,
        chi_delta2=chi_delta2,
        rr_H=rr_h,
        rr_K=rr_k,
        rank_intersection=rank(inter),
        hnc_ok=chi_delta1 <= rr_h * rr_k,
        shnc_ok=chi_delta2 <= rr_h * rr_k,
    )
