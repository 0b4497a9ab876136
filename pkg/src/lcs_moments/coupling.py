"""Dominant-letter insertion chain, exact law oracles, and the swap experiment.

The chain starts from a pair with no dominant letters and converts one
uniformly chosen non-dominant letter per step; after k steps its marginal law
equals the law of an iid pair conditioned on holding exactly k dominant
letters. Both laws are computed exactly on tiny alphabets so the equality can
be checked to rounding error. The swap experiment applies one conversion to
an iid pair and records the change of the LCS length, which is always in
{-1, 0, +1}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .kernel import lcs_length_fast
from .words import AlphabetDist, SequencePair, Word, letters_of, stream

_EXACT_STATE_CAP = 200_000


@dataclass(frozen=True)
class SwapOutcome:
    """Result of converting one non-dominant letter to the dominant one."""

    strand: str  # "x" or "y"
    index: int  # 1-based position within the strand
    delta: int  # LCS length change, in {-1, 0, +1}


@dataclass(frozen=True)
class CouplingTrace:
    """One trajectory of the insertion chain with per-step LCS lengths."""

    start_k: int
    states: tuple[SequencePair, ...]
    lc: tuple[int, ...]

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.lc, self.lc[1:]))

    @property
    def n(self) -> int:
        return self.states[0].n


def _pair_from_arrays(xa: np.ndarray, ya: np.ndarray) -> SequencePair:
    return SequencePair(
        Word(tuple(int(c) for c in xa)), Word(tuple(int(c) for c in ya))
    )


def chain_init(dist: AlphabetDist, n: int, seed: int, *path: int) -> SequencePair:
    """Initial chain state: 2n iid draws from the non-dominant letters."""
    letters = dist.nondominant_letters()
    probs = dist.renormalized_nondominant()  # raises on a dominant point mass
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    rng = stream(seed, *path)
    draws = np.searchsorted(cum, rng.random(2 * n), side="right")
    mapped = np.asarray(letters, dtype=np.int64)[draws]
    return _pair_from_arrays(mapped[:n], mapped[n:])


def _nondominant_positions(pair: SequencePair, dominant: int) -> list[tuple[int, int]]:
    """(strand, index) of every non-dominant letter; strand 0 is x, 1 is y."""
    out = []
    for strand, word in enumerate((pair.x, pair.y)):
        for i, c in enumerate(word.letters, start=1):
            if c != dominant:
                out.append((strand, i))
    return out


def _replace(pair: SequencePair, strand: int, index: int, letter: int) -> SequencePair:
    word = pair.x if strand == 0 else pair.y
    letters = word.letters[: index - 1] + (letter,) + word.letters[index:]
    if strand == 0:
        return SequencePair(Word(letters), pair.y)
    return SequencePair(pair.x, Word(letters))


def chain_step(pair: SequencePair, dominant: int, seed: int) -> SequencePair:
    """Convert one uniformly chosen non-dominant letter to the dominant one."""
    positions = _nondominant_positions(pair, dominant)
    if not positions:
        raise ValueError("chain is absorbed: no non-dominant letter remains")
    rng = stream(seed)
    strand, index = positions[int(rng.integers(0, len(positions)))]
    return _replace(pair, strand, index, dominant)


def run_chain(dist: AlphabetDist, n: int, seed: int) -> CouplingTrace:
    """Full trajectory k = 0..2n with per-step LCS lengths.

    The initial state draws from substream (seed, 0) and the position choice
    of step k+1 from substream (seed, k+1), so trajectories with the same
    seed can be compared step by step across variants.
    """
    dominant = dist.dominant_index
    pair = chain_init(dist, n, seed, 0)
    states = [pair]
    lcs = [lcs_length_fast(pair.x, pair.y)]
    for k in range(1, 2 * n + 1):
        positions = _nondominant_positions(pair, dominant)
        rng = stream(seed, k)
        strand, index = positions[int(rng.integers(0, len(positions)))]
        pair = _replace(pair, strand, index, dominant)
        states.append(pair)
        lcs.append(lcs_length_fast(pair.x, pair.y))
    return CouplingTrace(start_k=0, states=tuple(states), lc=tuple(lcs))


def swap_experiment(
    pair: SequencePair, dominant: int, seed: int, forced_position: tuple[str, int] | None = None
) -> SwapOutcome:
    """Replace one uniformly chosen non-dominant letter and record the change.

    ``forced_position`` = ("x"|"y", index) bypasses the random choice; used
    for worked fixtures.
    """
    positions = _nondominant_positions(pair, dominant)
    if not positions:
        raise ValueError("no non-dominant letters to swap")
    if forced_position is not None:
        strand = 0 if forced_position[0] == "x" else 1
        index = forced_position[1]
        if (strand, index) not in positions:
            raise ValueError(f"position {forced_position} is not a non-dominant letter")
    else:
        rng = stream(seed)
        strand, index = positions[int(rng.integers(0, len(positions)))]
    before = lcs_length_fast(pair.x, pair.y)
    after_pair = _replace(pair, strand, index, dominant)
    after = lcs_length_fast(after_pair.x, after_pair.y)
    return SwapOutcome(strand="x" if strand == 0 else "y", index=index, delta=after - before)


def swap_deltas_exhaustive(pair: SequencePair, dominant: int) -> list[SwapOutcome]:
    """Deltas for every equiprobable non-dominant position of a fixed pair."""
    before = lcs_length_fast(pair.x, pair.y)
    out = []
    for strand, index in _nondominant_positions(pair, dominant):
        after_pair = _replace(pair, strand, index, dominant)
        after = lcs_length_fast(after_pair.x, after_pair.y)
        out.append(
            SwapOutcome(strand="x" if strand == 0 else "y", index=index, delta=after - before)
        )
    return out


def _state_space_size(m: int, n: int) -> int:
    return m ** (2 * n)


def conditional_law_exact(dist: AlphabetDist, n: int, k: int) -> dict[tuple[int, ...], float]:
    """Exact law of an iid pair given exactly k dominant letters overall.

    States are the concatenated 2n-tuples (x letters then y letters). Each
    state with k dominant letters has probability C(2n,k)^-1 times the
    product of the renormalized non-dominant probabilities.
    """
    m = dist.m
    if _state_space_size(m, n) > _EXACT_STATE_CAP:
        raise ValueError("state space too large for exact enumeration")
    if not 0 <= k <= 2 * n:
        raise ValueError(f"k={k} outside [0, {2 * n}]")
    dominant = dist.dominant_index
    rest = 1.0 - dist.p_dominant
    if rest <= 0.0 and k < 2 * n:
        raise ValueError("conditional law undefined: dominant point mass")
    inv_binom = 1.0 / math.comb(2 * n, k)
    law: dict[tuple[int, ...], float] = {}
    for state in itertools.product(range(1, m + 1), repeat=2 * n):
        q_dom = sum(1 for c in state if c == dominant)
        if q_dom != k:
            continue
        p = inv_binom
        for c in state:
            if c != dominant:
                p *= dist.probs[c - 1] / rest
        law[state] = p
    return law


def chain_law_exact(dist: AlphabetDist, n: int, k: int) -> dict[tuple[int, ...], float]:
    """Exact marginal law of the chain after k steps, by forward propagation."""
    m = dist.m
    if _state_space_size(m, n) > _EXACT_STATE_CAP:
        raise ValueError("state space too large for exact enumeration")
    if not 0 <= k <= 2 * n:
        raise ValueError(f"k={k} outside [0, {2 * n}]")
    dominant = dist.dominant_index
    nd_letters = dist.nondominant_letters()
    nd_probs = dist.renormalized_nondominant()
    law: dict[tuple[int, ...], float] = {}
    for state in itertools.product(nd_letters, repeat=2 * n):
        p = 1.0
        for c in state:
            p *= nd_probs[nd_letters.index(c)]
        law[state] = p
    for step in range(k):
        remaining = 2 * n - step
        nxt: dict[tuple[int, ...], float] = {}
        for state, p in law.items():
            share = p / remaining
            for i, c in enumerate(state):
                if c == dominant:
                    continue
                child = state[:i] + (dominant,) + state[i + 1 :]
                nxt[child] = nxt.get(child, 0.0) + share
        law = nxt
    return law


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(s, 0.0) - q.get(s, 0.0)) for s in keys)


def sample_conditional_pair(dist: AlphabetDist, n: int, k: int, seed: int) -> SequencePair:
    """Direct draw from the conditional law for sizes beyond exact tables.

    Places k dominant letters uniformly among the 2n positions and fills the
    rest iid from the renormalized non-dominant law.
    """
    if not 0 <= k <= 2 * n:
        raise ValueError(f"k={k} outside [0, {2 * n}]")
    rng = stream(seed)
    flat = np.empty(2 * n, dtype=np.int64)
    positions = rng.permutation(2 * n)[:k]
    mask = np.zeros(2 * n, dtype=bool)
    mask[positions] = True
    flat[mask] = dist.dominant_index
    count_rest = 2 * n - k
    if count_rest:
        letters = dist.nondominant_letters()
        probs = dist.renormalized_nondominant()
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        draws = np.searchsorted(cum, rng.random(count_rest), side="right")
        flat[~mask] = np.asarray(letters, dtype=np.int64)[draws]
    return _pair_from_arrays(flat[:n], flat[n:])


def slope_event(trace: CouplingTrace, interval: tuple[int, int], ell: float, c: float) -> bool:
    """Whether the trace climbs with slope at least ``c`` on the interval.

    True iff LC(j) - LC(i) >= c*(j - i) for all interval points with
    j >= i + ell.
    """
    lo = max(0, math.ceil(interval[0]))
    hi = min(len(trace.lc) - 1, math.floor(interval[1]))
    for i in range(lo, hi + 1):
        j0 = max(i + math.ceil(ell), i + 1)
        for j in range(j0, hi + 1):
            if trace.lc[j] - trace.lc[i] < c * (j - i):
                return False
    return True
