"""Alphabet distributions, reproducible word sampling, and dominant-letter gap statistics.

Letters are 1-based indices into the alphabet. One letter is designated
*dominant*; everything downstream (cells, coupling chain, swaps) treats it
specially. Sampling is a pure function of ``(dist, n, seed)``: all randomness
flows through counter-based Philox streams keyed by ``(seed, *path)`` so that
replicate ``r`` of an experiment can use stream ``(seed, r)`` and results do
not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_SUM_TOL = 1e-9
_UINT64_MASK = (1 << 64) - 1


class DistributionError(ValueError):
    """Invalid alphabet distribution."""


def stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for the substream ``(seed, *path)``.

    Distinct paths give statistically independent streams; the same
    ``(seed, path)`` gives the same bit stream on every platform.
    """
    ss = np.random.SeedSequence(entropy=seed & _UINT64_MASK, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class AlphabetDist:
    """Probability vector over ``m`` letters with a designated dominant letter."""

    probs: tuple[float, ...]
    dominant_index: int  # 1-based
    theorem_regime: bool = False

    @property
    def m(self) -> int:
        return len(self.probs)

    @property
    def p_dominant(self) -> float:
        return self.probs[self.dominant_index - 1]

    def nondominant_letters(self) -> tuple[int, ...]:
        return tuple(j for j in range(1, self.m + 1) if j != self.dominant_index)

    def renormalized_nondominant(self) -> tuple[float, ...]:
        """Probabilities of the non-dominant letters given the draw is not dominant."""
        rest = 1.0 - self.p_dominant
        if rest <= 0.0:
            raise DistributionError("distribution is a point mass on the dominant letter")
        return tuple(self.probs[j - 1] / rest for j in self.nondominant_letters())


def validate_dist(probs, dominant_index: int) -> AlphabetDist:
    """Validate and normalize a probability vector; compute the theorem-regime flag.

    The flag is informational: it records whether the dominant probability
    exceeds 1/2 and every other letter is below the (astronomically small)
    threshold under which the quantitative swap bounds hold.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DistributionError("probs must be a non-empty 1-d vector")
    if not np.all(np.isfinite(p)):
        raise DistributionError("probs must be finite")
    if np.any(p <= 0.0):
        raise DistributionError("all probabilities must be strictly positive")
    total = float(p.sum())
    if abs(total - 1.0) > _SUM_TOL:
        raise DistributionError(f"probabilities sum to {total!r}, not 1")
    p = p / total
    m = p.size
    if not 1 <= dominant_index <= m:
        raise DistributionError(f"dominant_index {dominant_index} out of range [1, {m}]")

    # Threshold constants for the small-p regime; see bounds.theorem_constants.
    k_const = min(2.0**-4 * 1e-2 * np.exp(-67.0), 1.0 / (800.0 * m))
    p2_threshold = min(2.0**-2 * np.exp(-5.0) * k_const / m, k_const / (2.0 * m * m))
    p_dom = float(p[dominant_index - 1])
    others = np.delete(p, dominant_index - 1)
    max_other = float(others.max()) if others.size else 0.0
    regime = (
        p_dom > 0.5
        and p_dom == float(p.max())
        and max_other <= p2_threshold
    )
    return AlphabetDist(tuple(float(v) for v in p), dominant_index, regime)


@dataclass(frozen=True)
class Word:
    """A finite sequence of 1-based letter indices."""

    letters: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.letters, dtype=np.int64)


def letters_of(word) -> np.ndarray:
    """Coerce a Word, sequence, or ndarray into an int64 letter array."""
    if isinstance(word, Word):
        return word.to_array()
    return np.asarray(word, dtype=np.int64)


def word_to_string(word, m: int | None = None) -> str:
    """Serialize a word: digit string for alphabets up to 9 letters, else CSV."""
    arr = letters_of(word)
    top = int(arr.max()) if arr.size else 1
    if m is None:
        m = top
    if m <= 9:
        return "".join(str(int(c)) for c in arr)
    return ",".join(str(int(c)) for c in arr)


def word_from_string(text: str) -> Word:
    """Parse the serialization produced by :func:`word_to_string`."""
    text = text.strip()
    if not text:
        return Word(())
    if "," in text:
        return Word(tuple(int(tok) for tok in text.split(",")))
    return Word(tuple(int(ch) for ch in text))


@dataclass(frozen=True)
class SequencePair:
    """Two words of equal length, the inputs of every two-word experiment."""

    x: Word
    y: Word

    def __post_init__(self):
        if self.x.n != self.y.n:
            raise ValueError(f"length mismatch: {self.x.n} != {self.y.n}")

    @property
    def n(self) -> int:
        return self.x.n


def _sample_letters(dist: AlphabetDist, count: int, rng: np.random.Generator) -> np.ndarray:
    # Inverse-CDF keeps the draw a pure function of the uniform stream.
    cum = np.cumsum(dist.probs)
    cum[-1] = 1.0
    u = rng.random(count)
    return np.searchsorted(cum, u, side="right").astype(np.int64) + 1


def sample_pair_arrays(dist: AlphabetDist, n: int, seed: int, *path: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample the two iid letter arrays of a pair; hot-path variant of sample_pair."""
    if n < 1:
        raise ValueError("n must be >= 1")
    letters = _sample_letters(dist, 2 * n, stream(seed, *path))
    return letters[:n], letters[n:]


def sample_pair(dist: AlphabetDist, n: int, seed: int) -> SequencePair:
    """Draw two independent words of length ``n``, 2n iid letters from ``dist``."""
    xa, ya = sample_pair_arrays(dist, n, seed)
    return SequencePair(Word(tuple(int(c) for c in xa)), Word(tuple(int(c) for c in ya)))


@dataclass(frozen=True)
class GapStats:
    """Counts of each non-dominant letter between consecutive dominant letters.

    ``counts[j]`` lists, for gap index i = 1..dominant_count, the number of
    letters j in the i-th gap; gap 1 is the prefix before the first dominant
    letter. Letters after the last dominant letter form a partial gap that is
    reported separately in ``trailing`` because the gap law only applies to
    completed gaps.
    """

    n: int
    dominant_count: int
    counts: dict[int, list[int]] = field(default_factory=dict)
    trailing: dict[int, int] = field(default_factory=dict)

    def total_nondominant(self) -> int:
        return sum(sum(v) for v in self.counts.values()) + sum(self.trailing.values())


def gap_statistics(word, dist: AlphabetDist) -> GapStats:
    """Per-letter gap counts between consecutive dominant letters."""
    arr = letters_of(word)
    if arr.size and (arr.min() < 1 or arr.max() > dist.m):
        raise ValueError("word contains letters outside the alphabet")
    dom = dist.dominant_index
    is_dom = arr == dom
    d = int(is_dom.sum())
    # gap index of position i = number of dominant letters strictly before i
    gap_idx = np.cumsum(is_dom) - is_dom
    counts: dict[int, list[int]] = {}
    trailing: dict[int, int] = {}
    for j in dist.nondominant_letters():
        sel = arr == j
        per_gap = np.bincount(gap_idx[sel], minlength=d + 1)
        counts[j] = [int(c) for c in per_gap[:d]]
        trailing[j] = int(per_gap[d]) if per_gap.size > d else 0
    return GapStats(n=int(arr.size), dominant_count=d, counts=counts, trailing=trailing)


def geometric_gap_parameter(dist: AlphabetDist, j: int) -> float:
    """Success parameter of the law of (gap count of letter j) + 1."""
    p1 = dist.p_dominant
    pj = dist.probs[j - 1]
    return p1 / (p1 + pj)
