"""Reduced words over a free group basis.

A word is a tuple of nonzero ints: ``i`` in 1..r stands for the i-th
generator, ``-i`` for its inverse, and the empty tuple is the identity.
Text form uses the first r lowercase letters for generators and the
matching uppercase letters for inverses, so ``"abA"`` is a b a^-1.
"""

from __future__ import annotations

from bisect import bisect_right
from functools import lru_cache

MAX_RANK = 26

Word = "tuple[int, ...]"


def check_rank(r: int) -> int:
    if not isinstance(r, int) or not 1 <= r <= MAX_RANK:
        raise ValueError(f"alphabet rank must be an integer in 1..{MAX_RANK}, got {r!r}")
    return r


def check_letter(x: int, r: int) -> int:
    if not isinstance(x, int) or x == 0 or abs(x) > r:
        raise ValueError(f"letter {x!r} outside signed alphabet of rank {r}")
    return x


def parse_word(text: str, r: int, reduce: bool = False) -> tuple:
    """Parse the text form of a word; rejects non-reduced input unless reduce is set."""
    check_rank(r)
    letters = []
    for pos, c in enumerate(text):
        if "a" <= c <= "z":
            x = ord(c) - ord("a") + 1
        elif "A" <= c <= "Z":
            x = -(ord(c) - ord("A") + 1)
        else:
            raise ValueError(f"invalid character {c!r} at position {pos}")
        if abs(x) > r:
            raise ValueError(f"letter {c!r} at position {pos} outside alphabet of rank {r}")
        letters.append(x)
    if reduce:
        return free_reduce(letters)
    word = tuple(letters)
    if not is_reduced(word):
        raise ValueError(f"word {text!r} is not reduced (use reduce to allow)")
    return word


def format_word(word) -> str:
    return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in word)


def is_reduced(word) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def free_reduce(letters, r: int | None = None) -> tuple:
    """Freely reduce a letter sequence; idempotent on reduced input."""
    if r is not None:
        check_rank(r)
    stack = []
    for x in letters:
        if not isinstance(x, int) or x == 0 or (r is not None and abs(x) > r):
            raise ValueError(f"letter {x!r} outside signed alphabet")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def invert(word) -> tuple:
    return tuple(-x for x in reversed(word))


def concat_reduce(u, v) -> tuple:
    """Reduced form of the concatenation of two reduced words."""
    i, j = len(u), 0
    while i > 0 and j < len(v) and u[i - 1] == -v[j]:
        i -= 1
        j += 1
    return tuple(u[:i]) + tuple(v[j:])


def cyclically_reduce(word) -> tuple:
    """Split a reduced word as w = v t v^-1 with t cyclically reduced.

    Returns the pair (v, t); t is empty iff w is empty.
    """
    i, j = 0, len(word)
    while j - i >= 2 and word[i] == -word[j - 1]:
        i += 1
        j -= 1
    return tuple(word[:i]), tuple(word[i:j])


def sphere_size(r: int, n: int) -> int:
    """Number of reduced words of length exactly n."""
    check_rank(r)
    if n < 0:
        raise ValueError("length must be nonnegative")
    if n == 0:
        return 1
    return 2 * r * (2 * r - 1) ** (n - 1)


def count_reduced_words(r: int, n: int) -> int:
    """Number of reduced words of length at most n, exactly."""
    return _cumulative_counts(r, n)[-1]


@lru_cache(maxsize=64)
def _cumulative_counts(r: int, n: int) -> tuple:
    # c[m] = number of reduced words of length <= m, for m = 0..n
    check_rank(r)
    if n < 0:
        raise ValueError("length bound must be nonnegative")
    out = [1]
    for m in range(1, n + 1):
        out.append(out[-1] + 2 * r * (2 * r - 1) ** (m - 1))
    return tuple(out)


@lru_cache(maxsize=32)
def _signed_alphabet(r: int) -> tuple:
    return tuple(range(1, r + 1)) + tuple(range(-1, -r - 1, -1))


def _letter_index(x: int, r: int) -> int:
    return x - 1 if x > 0 else r - x - 1


def random_reduced_word(r: int, n: int, rng, mode: str = "at-most") -> tuple:
    """Uniform random reduced word.

    mode "exact": uniform over the sphere of length n.  mode "at-most":
    uniform over all reduced words of length <= n, by exact integer
    cumulative weights (no floating point in the selection).
    """
    check_rank(r)
    if r < 2:
        raise ValueError("word sampling needs alphabet rank at least 2")
    if n < 0:
        raise ValueError("length must be nonnegative")
    if mode == "at-most":
        cum = _cumulative_counts(r, n)
        length = bisect_right(cum, rng.randrange(cum[-1]))
    elif mode == "exact":
        length = n
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    if length == 0:
        return ()
    alph = _signed_alphabet(r)
    word = [alph[rng.randrange(2 * r)]]
    for _ in range(length - 1):
        j = rng.randrange(2 * r - 1)
        skip = _letter_index(-word[-1], r)
        if j >= skip:
            j += 1
        word.append(alph[j])
    return tuple(word)
