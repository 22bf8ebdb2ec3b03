"""Partial injections on {1..n}: orbits, exact counting, uniform sampling.

The counting families, all as exact arbitrary-precision integers:

* I[n]: all partial injections,
* J[n]: fragmented permutations (no cycles, sequences only),
* K[n]: partial injections whose cycles all have length 1,
* L[n]: partial injections without fixpoints.

Uniform generation uses the recursive method: draw the component of the
smallest unplaced element (size and type by exact integer weights), place
it, recurse on the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class PartialInjection:
    """An injective partial map on {1..n}.

    The map is stored as a list indexed 1..n with 0 for "undefined".
    Instances are treated as immutable once built.
    """

    __slots__ = ("n", "map")

    def __init__(self, n: int, mapping=None):
        if n < 0:
            raise ValueError("domain size must be nonnegative")
        self.n = n
        m = [0] * (n + 1)
        if mapping:
            pairs = mapping.items() if hasattr(mapping, "items") else mapping
            seen = set()
            for i, j in pairs:
                if not (1 <= i <= n and 1 <= j <= n):
                    raise ValueError(f"pair ({i},{j}) outside {{1..{n}}}")
                if m[i]:
                    raise ValueError(f"element {i} mapped twice")
                if j in seen:
                    raise ValueError(f"element {j} hit twice (not injective)")
                m[i] = j
                seen.add(j)
        self.map = m

    @classmethod
    def _from_map(cls, n: int, map_list: list) -> "PartialInjection":
        # trusted constructor, no validation
        self = object.__new__(cls)
        self.n = n
        self.map = map_list
        return self

    def apply(self, i: int):
        j = self.map[i]
        return j if j else None

    @property
    def domain_size(self) -> int:
        return sum(1 for j in self.map[1:] if j)

    @property
    def is_permutation(self) -> bool:
        return self.domain_size == self.n

    def pairs(self):
        return [(i, j) for i, j in enumerate(self.map) if i and j]

    def __eq__(self, other):
        return (
            isinstance(other, PartialInjection)
            and self.n == other.n
            and self.map == other.map
        )

    def __hash__(self):
        return hash((self.n, tuple(self.map)))

    def __repr__(self):
        inner = ", ".join(f"{i}->{j}" for i, j in self.pairs())
        return f"PartialInjection({self.n}, {{{inner}}})"

    def decompose(self) -> "OrbitDecomposition":
        """Split {1..n} into the cycles and sequences of the map."""
        m = self.map
        in_range = [False] * (self.n + 1)
        for j in m[1:]:
            if j:
                in_range[j] = True
        seen = [False] * (self.n + 1)
        sequences = []
        for i in range(1, self.n + 1):
            if in_range[i]:
                continue
            # i is a source: walk to the sink
            seq = []
            v = i
            while v:
                seen[v] = True
                seq.append(v)
                v = m[v]
            sequences.append(seq)
        cycles = []
        for i in range(1, self.n + 1):
            if seen[i]:
                continue
            cyc = []
            v = i
            while not seen[v]:
                seen[v] = True
                cyc.append(v)
                v = m[v]
            cycles.append(cyc)
        return OrbitDecomposition(cycles, sequences)

    def cycle_length_gcd(self):
        """gcd of all cycle lengths, or None if there is no cycle."""
        g = 0
        for cyc in self.decompose().cycles:
            g = math.gcd(g, len(cyc))
        return g if g else None

    def statistics(self) -> dict:
        dec = self.decompose()
        lengths = [len(c) for c in dec.cycles]
        return {
            "has_fixpoint": any(n == 1 for n in lengths),
            "max_cycle_length": max(lengths, default=0),
            "num_sequences": len(dec.sequences),
        }


@dataclass
class OrbitDecomposition:
    """Cycles and sequences of a partial injection.

    Cycles are in traversal order; sequences run from source to sink.
    An isolated element is a size-1 sequence.
    """

    cycles: list
    sequences: list


def count_partial_injections(n_max: int) -> list:
    """Table I[0..n_max] of partial injection counts.

    Computed by removing the component of a marked element: the terms
    C(n-1,k-1) (k! + (k-1)!) I[n-k] are exactly the sampler weights.
    """
    if n_max < 0:
        raise ValueError("bound must be nonnegative")
    fact = _factorials(n_max)
    table = [1]
    for n in range(1, n_max + 1):
        total = 0
        binom = 1  # C(n-1, k-1)
        for k in range(1, n + 1):
            total += binom * (fact[k] + fact[k - 1]) * table[n - k]
            binom = binom * (n - k) // k
        table.append(total)
    return table


def count_fragmented_permutations(n_max: int) -> list:
    """Table J[0..n_max]: partial injections with no cycle at all."""
    if n_max < 0:
        raise ValueError("bound must be nonnegative")
    table = [1, 1][: n_max + 1]
    for m in range(1, n_max):
        table.append((2 * m + 1) * table[m] - (m - 1) * m * table[m - 1])
    return table


def count_no_big_cycle_injections(n_max: int) -> list:
    """Table K[0..n_max]: partial injections whose cycles are all fixpoints.

    Such a map is a set of fixpoints plus a fragmented permutation, so
    K_n is the binomial convolution of J with the all-ones sequence.
    """
    J = count_fragmented_permutations(n_max)
    table = []
    for n in range(n_max + 1):
        binom = 1
        total = 0
        for k in range(n + 1):
            total += binom * J[k]
            binom = binom * (n - k) // (k + 1)
        table.append(total)
    return table


def count_fixpoint_free_injections(n_max: int) -> list:
    """Table L[0..n_max]: partial injections without fixpoints (inclusion-exclusion)."""
    I = count_partial_injections(n_max)
    table = []
    for n in range(n_max + 1):
        binom = 1
        total = 0
        for k in range(n + 1):
            total += (-1) ** k * binom * I[n - k]
            binom = binom * (n - k) // (k + 1)
        table.append(total)
    return table


_orbit_multiple_tables: dict = {}


def count_orbit_multiple(n: int, d: int) -> int:
    """Number of size-n permutations all of whose orbit lengths are multiples of d.

    Removal of the orbit of a marked element gives the recurrence
    P[m] = sum over k of C(m-1, kd-1) (kd-1)! P[m-kd], P[0] = 1.
    The value is 0 whenever d does not divide n.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if n < 0:
        raise ValueError("n must be nonnegative")
    table = _orbit_multiple_tables.setdefault(d, [1])
    if n >= len(table):
        fact = _factorials(n)
        for m in range(len(table), n + 1):
            total = 0
            for k in range(1, m // d + 1):
                total += _binomial(m - 1, k * d - 1) * fact[k * d - 1] * table[m - k * d]
            table.append(total)
    return table[n]


def count_gcd_not_one(n: int) -> int:
    """Number of size-n permutations whose orbit lengths have gcd > 1.

    Inclusion-exclusion over the squarefree products of the prime
    divisors of n (orbit gcd divisible by d is only possible when d | n).
    """
    if n < 1:
        raise ValueError("n must be positive")
    primes = _prime_divisors(n)
    total = 0
    for mask in range(1, 1 << len(primes)):
        d = 1
        bits = 0
        for idx, p in enumerate(primes):
            if mask >> idx & 1:
                d *= p
                bits += 1
        total += (-1) ** (bits + 1) * count_orbit_multiple(n, d)
    return total


def _prime_divisors(n: int) -> list:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def _binomial(n: int, k: int) -> int:
    return math.comb(n, k)


def _factorials(n: int) -> list:
    out = [1] * (n + 1)
    for i in range(1, n + 1):
        out[i] = out[i - 1] * i
    return out


_COUNTERS = {
    "I": count_partial_injections,
    "J": count_fragmented_permutations,
    "K": count_no_big_cycle_injections,
    "L": count_fixpoint_free_injections,
}


class CountCache:
    """Lazy shared tables of the I, J, K, L counts and factorials.

    Tables grow on demand (geometric regrowth); grow before sharing
    across threads, then treat as read-only.  Returned lists are the
    internal tables, do not mutate them.
    """

    def __init__(self, limit: int = 0):
        self._tables: dict = {}
        self._fact = [1]
        if limit:
            self.table("I", limit)

    def table(self, name: str, n: int) -> list:
        if name not in _COUNTERS:
            raise ValueError(f"unknown sequence {name!r} (expected one of I, J, K, L)")
        cur = self._tables.get(name)
        if cur is None or len(cur) <= n:
            bound = max(n, 2 * (len(cur) - 1) if cur else 0, 16)
            self._tables[name] = _COUNTERS[name](bound)
        return self._tables[name]

    def value(self, name: str, n: int) -> int:
        return self.table(name, n)[n]

    def factorials(self, n: int) -> list:
        while len(self._fact) <= n:
            self._fact.append(self._fact[-1] * len(self._fact))
        return self._fact


def uniform_partial_injection(n: int, cache: CountCache, rng) -> PartialInjection:
    """Draw a partial injection on {1..n}, exactly uniform over all I[n] of them.

    Recursive method: with m elements left, the component of the smallest
    unplaced element has size k and type tau with probability
    C(m-1,k-1) w_tau(k) I[m-k] / I[m], where w_seq(k) = k! and
    w_cyc(k) = (k-1)!.  All selections use exact integer arithmetic.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    I = cache.table("I", n)
    fact = cache.factorials(n)
    remaining = list(range(1, n + 1))
    map_list = [0] * (n + 1)
    while remaining:
        m = len(remaining)
        u = rng.randrange(I[m])
        k = 1
        binom = 1  # C(m-1, k-1)
        while True:
            w_seq = binom * fact[k] * I[m - k]
            if u < w_seq:
                is_cycle = False
                break
            u -= w_seq
            w_cyc = binom * fact[k - 1] * I[m - k]
            if u < w_cyc:
                is_cycle = True
                break
            u -= w_cyc
            binom = binom * (m - k) // k
            k += 1
        marked = remaining[0]
        if k == m:
            members = remaining
            remaining = []
        elif k == 1:
            members = [marked]
            remaining = remaining[1:]
        else:
            chosen = sorted(rng.sample(range(1, m), k - 1))
            members = [marked] + [remaining[i] for i in chosen]
            picked = set(chosen)
            remaining = [remaining[i] for i in range(1, m) if i not in picked]
        if is_cycle:
            tail = members[1:]
            rng.shuffle(tail)
            order = [marked] + tail
            for i in range(k):
                map_list[order[i]] = order[(i + 1) % k]
        else:
            order = members[:]
            rng.shuffle(order)
            for i in range(k - 1):
                map_list[order[i]] = order[i + 1]
    return PartialInjection._from_map(n, map_list)


def uniform_permutation(n: int, rng) -> PartialInjection:
    """Uniform total permutation of {1..n} as a PartialInjection."""
    images = list(range(1, n + 1))
    rng.shuffle(images)
    return PartialInjection._from_map(n, [0] + images)
