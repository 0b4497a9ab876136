import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcs_moments.words import (
    DistributionError,
    Word,
    gap_statistics,
    geometric_gap_parameter,
    sample_pair,
    sample_pair_arrays,
    stream,
    validate_dist,
    word_from_string,
    word_to_string,
)


class TestValidateDist:
    def test_uniform_binary_not_theorem_regime(self):
        d = validate_dist((0.5, 0.5), 1)
        assert d.m == 2
        assert not d.theorem_regime

    def test_single_letter_alphabet(self):
        d = validate_dist((1.0,), 1)
        assert d.m == 1
        assert d.p_dominant == 1.0

    def test_biased_binary_regime_flag_off(self):
        # the threshold on the second letter is astronomically small
        k = min(2.0**-4 * 1e-2 * np.exp(-67.0), 1.0 / 1600.0)
        assert k == pytest.approx(4.9e-33, rel=0.02)
        d = validate_dist((0.9, 0.1), 1)
        assert not d.theorem_regime

    def test_normalizes_small_drift(self):
        d = validate_dist((0.5 + 1e-12, 0.5), 1)
        assert sum(d.probs) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize(
        "probs,dom",
        [((0.5, -0.5), 1), ((0.0, 1.0), 2), ((0.4, 0.4), 1), ((0.5, 0.5), 3)],
    )
    def test_rejects_bad_input(self, probs, dom):
        with pytest.raises(DistributionError):
            validate_dist(probs, dom)

    def test_renormalized_nondominant(self):
        d = validate_dist((0.6, 0.3, 0.1), 1)
        assert d.renormalized_nondominant() == pytest.approx((0.75, 0.25))
        with pytest.raises(DistributionError):
            validate_dist((1.0,), 1).renormalized_nondominant()


class TestStream:
    def test_same_path_same_draws(self):
        a = stream(7, 1, 2).random(5)
        b = stream(7, 1, 2).random(5)
        assert np.array_equal(a, b)

    def test_distinct_paths_differ(self):
        a = stream(7, 1).random(5)
        b = stream(7, 2).random(5)
        assert not np.array_equal(a, b)


class TestSamplePair:
    def test_deterministic(self, ternary_dist):
        p1 = sample_pair(ternary_dist, 5, seed=7)
        p2 = sample_pair(ternary_dist, 5, seed=7)
        assert p1 == p2

    def test_point_mass_all_dominant(self):
        d = validate_dist((1.0,), 1)
        pair = sample_pair(d, 4, seed=0)
        assert pair.x.letters == (1, 1, 1, 1)
        assert pair.y.letters == (1, 1, 1, 1)

    def test_law_of_large_numbers(self, biased_dist):
        xa, ya = sample_pair_arrays(biased_dist, 10**5, seed=3)
        freq = float(((xa == 1).sum() + (ya == 1).sum()) / (2 * 10**5))
        # 6 sigma tolerance is ~0.004; the stated tolerance is looser
        assert abs(freq - 0.9) < 0.01

    def test_rejects_nonpositive_length(self, biased_dist):
        with pytest.raises(ValueError):
            sample_pair(biased_dist, 0, seed=0)


class TestSerialization:
    def test_digit_string_round_trip(self):
        w = Word((1, 2, 1, 3, 1, 3, 1, 1, 1, 2))
        assert word_to_string(w) == "1213131112"
        assert word_from_string("1213131112") == w

    def test_csv_for_large_alphabets(self):
        w = Word((1, 12, 3))
        assert word_to_string(w, m=12) == "1,12,3"
        assert word_from_string("1,12,3") == w

    @given(st.lists(st.integers(1, 9), max_size=30))
    def test_round_trip_property(self, letters):
        w = Word(tuple(letters))
        assert word_from_string(word_to_string(w)) == w


class TestGapStatistics:
    def test_simple_counts(self, biased_dist):
        gs = gap_statistics([2, 1, 2, 2, 1], biased_dist)
        assert gs.counts[2] == [1, 2]
        assert gs.trailing[2] == 0

    def test_all_dominant(self, biased_dist):
        gs = gap_statistics([1, 1, 1], biased_dist)
        assert gs.counts[2] == [0, 0, 0]
        assert gs.dominant_count == 3

    def test_trailing_partial_gap(self, biased_dist):
        gs = gap_statistics([1, 2, 2], biased_dist)
        assert gs.counts[2] == [0]
        assert gs.trailing[2] == 2

    def test_rejects_foreign_letters(self, biased_dist):
        with pytest.raises(ValueError):
            gap_statistics([1, 3], biased_dist)

    @settings(deadline=None, max_examples=50)
    @given(st.integers(0, 200), st.integers(0, 2**32 - 1))
    def test_reconstruction_invariant(self, n, seed):
        dist = validate_dist((0.6, 0.3, 0.1), 1)
        rng = stream(seed)
        word = rng.integers(1, 4, size=n)
        gs = gap_statistics(word, dist)
        assert gs.total_nondominant() + gs.dominant_count == n

    def test_geometric_parameter(self, ternary_dist):
        assert geometric_gap_parameter(ternary_dist, 2) == pytest.approx(0.6 / 0.9)
        assert geometric_gap_parameter(ternary_dist, 3) == pytest.approx(0.6 / 0.7)
