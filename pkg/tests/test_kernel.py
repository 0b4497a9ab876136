import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcs_moments.kernel import (
    CapExceeded,
    enumerate_optimal_alignments,
    lcs_backtrack,
    lcs_length,
    lcs_length_fast,
    match_masks,
)

words = st.lists(st.integers(1, 3), max_size=24)


class TestLcsLength:
    def test_worked_example(self, two_cell_pair):
        x, y = two_cell_pair
        assert lcs_length(x, y) == 8

    def test_identity(self):
        w = [1, 2, 1, 2, 2, 1]
        assert lcs_length(w, w) == len(w)

    def test_disjoint_letters(self):
        assert lcs_length([1] * 5, [2] * 5) == 0

    def test_empty(self):
        assert lcs_length([], [1, 2]) == 0

    @given(words, words)
    def test_symmetry(self, x, y):
        assert lcs_length(x, y) == lcs_length(y, x)

    @given(words, words, st.integers(1, 3))
    def test_monotone_extension(self, x, y, c):
        base = lcs_length(x, y)
        assert lcs_length(x + [c], y) >= base
        assert lcs_length(x, y + [c]) >= base

    @given(words, words, words, words)
    def test_superadditive_concatenation(self, x, y, xp, yp):
        assert lcs_length(x + xp, y + yp) >= lcs_length(x, y) + lcs_length(xp, yp)

    @given(words, st.data())
    def test_single_change_moves_by_at_most_one(self, x, data):
        if not x:
            return
        y = data.draw(words)
        pos = data.draw(st.integers(0, len(x) - 1))
        letter = data.draw(st.integers(1, 3))
        mutated = list(x)
        mutated[pos] = letter
        assert abs(lcs_length(mutated, y) - lcs_length(x, y)) <= 1


class TestFastKernel:
    @given(words, words)
    def test_agrees_with_reference(self, x, y):
        assert lcs_length_fast(x, y) == lcs_length(x, y)

    def test_agrees_on_larger_random_pairs(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            m = int(rng.choice([2, 4, 8]))
            n1, n2 = rng.integers(0, 120, size=2)
            x = rng.integers(1, m + 1, size=n1)
            y = rng.integers(1, m + 1, size=n2)
            assert lcs_length_fast(x, y) == lcs_length(x, y)

    def test_precomputed_masks(self):
        rng = np.random.default_rng(1)
        y = rng.integers(1, 5, size=64)
        masks = match_masks(y)
        for _ in range(20):
            x = rng.integers(1, 5, size=64)
            assert lcs_length_fast(x, y, masks) == lcs_length(x, y)

    def test_identity_and_empty(self):
        w = [2, 1, 2]
        assert lcs_length_fast(w, w) == 3
        assert lcs_length_fast([], w) == 0
        assert lcs_length_fast([1] * 4, [2] * 4) == 0

    def test_throughput_advantage(self):
        # the bit-parallel kernel should beat the reference DP by a wide
        # margin on kilobyte words; 20x is the design floor
        rng = np.random.default_rng(0)
        x = rng.integers(1, 3, size=1024)
        y = rng.integers(1, 3, size=1024)
        lcs_length_fast(x, y)  # warm up mask building paths
        t0 = time.perf_counter()
        ref = lcs_length(x, y)
        t1 = time.perf_counter()
        best_fast = min(
            _timed(lambda: lcs_length_fast(x, y))[0] for _ in range(3)
        )
        assert lcs_length_fast(x, y) == ref
        assert (t1 - t0) / best_fast >= 20


def _timed(fn):
    t0 = time.perf_counter()
    value = fn()
    return time.perf_counter() - t0, value


class TestBacktrack:
    def test_worked_example_spells_subsequence(self, two_cell_pair):
        x, y = two_cell_pair
        al = lcs_backtrack(x, y)
        assert len(al) == 8
        assert al.common_word(x) == tuple(int(c) for c in "11311112")

    def test_identity_pairs(self):
        w = [1, 2, 2, 1]
        al = lcs_backtrack(w, w)
        assert al.pairs == tuple((i, i) for i in range(1, 5))

    def test_no_common_letters(self):
        assert lcs_backtrack([1, 1], [2, 2]).pairs == ()

    @given(words, words)
    @settings(max_examples=60)
    def test_pairs_are_valid_and_optimal(self, x, y):
        al = lcs_backtrack(x, y)
        assert len(al) == lcs_length(x, y)
        last = (0, 0)
        for i, j in al.pairs:
            assert i > last[0] and j > last[1]
            assert x[i - 1] == y[j - 1]
            last = (i, j)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        x = rng.integers(1, 3, size=40)
        y = rng.integers(1, 3, size=40)
        assert lcs_backtrack(x, y) == lcs_backtrack(x, y)


class TestEnumerateOptimal:
    def test_two_alternatives(self):
        als = enumerate_optimal_alignments([1, 2], [2, 1])
        assert len(als) == 2
        assert {al.pairs for al in als} == {((1, 2),), ((2, 1),)}

    def test_repeated_letters_single_maximal_set(self):
        als = enumerate_optimal_alignments([1, 1], [1, 1])
        assert [al.pairs for al in als] == [((1, 1), (2, 2))]

    def test_worked_example_all_length_eight(self, two_cell_pair):
        x, y = two_cell_pair
        als = enumerate_optimal_alignments(x, y, cap=5000)
        assert als
        assert all(len(al) == 8 for al in als)
        assert len({al.pairs for al in als}) == len(als)

    def test_cap_exceeded_reported(self):
        x = [1, 2, 3] * 3
        y = [3, 2, 1] * 3  # 36 distinct optimal alignments
        with pytest.raises(CapExceeded):
            enumerate_optimal_alignments(x, y, cap=10)

    @given(words, words)
    @settings(max_examples=30, deadline=None)
    def test_every_alignment_is_optimal_and_valid(self, x, y):
        try:
            als = enumerate_optimal_alignments(x, y, cap=2000)
        except CapExceeded:
            return
        target = lcs_length(x, y)
        for al in als:
            assert len(al) == target
            last = (0, 0)
            for i, j in al.pairs:
                assert i > last[0] and j > last[1]
                assert x[i - 1] == y[j - 1]
                last = (i, j)
