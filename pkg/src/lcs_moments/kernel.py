"""Exact LCS kernels: reference quadratic DP, bit-parallel kernel, backtracking.

``lcs_length`` is the deliberately plain reference implementation used as the
oracle everywhere; ``lcs_length_fast`` packs one DP row into a single big
integer (one bit per column, per-letter match masks) and agrees with the
reference on every input. The two are kept independent so each checks the
other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .words import letters_of


def lcs_length(x, y) -> int:
    """Length of the longest common subsequence, standard row DP.

    O(len(x) * len(y)) time, O(min) space.
    """
    a = [int(c) for c in letters_of(x)]
    b = [int(c) for c in letters_of(y)]
    if len(b) > len(a):
        a, b = b, a
    if not b:
        return 0
    row = [0] * (len(b) + 1)
    for ai in a:
        diag = 0
        for j in range(1, len(row)):
            tmp = row[j]
            if ai == b[j - 1]:
                if diag + 1 > row[j]:
                    row[j] = diag + 1
            elif row[j] < row[j - 1]:
                row[j] = row[j - 1]
            diag = tmp
    return row[-1]


def match_masks(y) -> dict[int, int]:
    """Per-letter bit masks of one word: bit i of masks[c] is set iff y[i] == c."""
    ya = letters_of(y)
    masks: dict[int, int] = {}
    for c in np.unique(ya):
        bits = np.packbits(ya == c, bitorder="little")
        masks[int(c)] = int.from_bytes(bits.tobytes(), "little")
    return masks


def lcs_length_fast(x, y, masks: dict[int, int] | None = None) -> int:
    """Bit-parallel LCS length; identical value to :func:`lcs_length`.

    The row is encoded in one integer V whose zero bits mark the columns where
    the DP row increments. For each letter of x, with U the matched subset of
    V, the update ``V <- ((V + U) | (V - U)) & full`` carries each matched
    block boundary one increment further. Precomputed ``masks`` for y may be
    passed when x varies against a fixed y.
    """
    xa = letters_of(x)
    ya = letters_of(y)
    n = int(ya.size)
    if n == 0 or xa.size == 0:
        return 0
    if masks is None:
        masks = match_masks(ya)
    full = (1 << n) - 1
    V = full
    get = masks.get
    for c in xa.tolist():
        U = V & get(c, 0)
        V = ((V + U) | (V - U)) & full
    return n - _popcount(V)


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class MatchedAlignment:
    """A strictly increasing list of matched index pairs (1-based)."""

    pairs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def common_word(self, x) -> tuple[int, ...]:
        xa = letters_of(x)
        return tuple(int(xa[i - 1]) for i, _ in self.pairs)


def _dp_table(xa: np.ndarray, ya: np.ndarray) -> np.ndarray:
    nx, ny = xa.size, ya.size
    table = np.zeros((nx + 1, ny + 1), dtype=np.int32)
    for i in range(1, nx + 1):
        cand = np.maximum(table[i - 1, 1:], table[i - 1, :-1] + (ya == xa[i - 1]))
        np.maximum.accumulate(cand, out=cand)
        table[i, 1:] = cand
    return table


def lcs_backtrack(x, y) -> MatchedAlignment:
    """One optimal alignment under a canonical tie-break.

    Ties prefer the diagonal (match) move, then stepping back in x; the
    matched pairs therefore sit as early in x as the DP allows, which
    reproduces the worked alignments used as fixtures.
    """
    xa, ya = letters_of(x), letters_of(y)
    table = _dp_table(xa, ya)
    pairs: list[tuple[int, int]] = []
    i, j = int(xa.size), int(ya.size)
    while i > 0 and j > 0:
        if xa[i - 1] == ya[j - 1] and table[i, j] == table[i - 1, j - 1] + 1:
            pairs.append((i, j))
            i -= 1
            j -= 1
        elif table[i - 1, j] == table[i, j]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    return MatchedAlignment(tuple(pairs))


class CapExceeded(RuntimeError):
    """Raised when alignment enumeration would exceed its cap."""

    def __init__(self, cap: int, partial_count: int):
        super().__init__(f"enumeration exceeded cap of {cap} alignments")
        self.cap = cap
        self.partial_count = partial_count


def enumerate_optimal_alignments(x, y, cap: int = 10_000) -> list[MatchedAlignment]:
    """All distinct optimal alignments as matched-pair sets, up to ``cap``.

    Distinct DP paths encoding the same pair set are deduplicated. Intended
    for short words; raises :class:`CapExceeded` instead of truncating.
    """
    xa, ya = letters_of(x), letters_of(y)
    table = _dp_table(xa, ya)
    memo: dict[tuple[int, int], frozenset] = {}

    def rec(i: int, j: int) -> frozenset:
        key = (i, j)
        got = memo.get(key)
        if got is not None:
            return got
        if table[i, j] == 0:
            result = frozenset({()})
        else:
            acc: set[tuple[tuple[int, int], ...]] = set()
            if (
                i > 0
                and j > 0
                and xa[i - 1] == ya[j - 1]
                and table[i, j] == table[i - 1, j - 1] + 1
            ):
                for tail in rec(i - 1, j - 1):
                    acc.add(tail + ((i, j),))
            if i > 0 and table[i - 1, j] == table[i, j]:
                acc |= rec(i - 1, j)
            if j > 0 and table[i, j - 1] == table[i, j]:
                acc |= rec(i, j - 1)
            if len(acc) > cap:
                raise CapExceeded(cap, len(acc))
            result = frozenset(acc)
        memo[key] = result
        return result

    alignments = sorted(rec(int(xa.size), int(ya.size)))
    if len(alignments) > cap:
        raise CapExceeded(cap, len(alignments))
    return [MatchedAlignment(a) for a in alignments]
