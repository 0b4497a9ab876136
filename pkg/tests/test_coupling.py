import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcs_moments.coupling import (
    CouplingTrace,
    chain_init,
    chain_law_exact,
    chain_step,
    conditional_law_exact,
    run_chain,
    sample_conditional_pair,
    slope_event,
    swap_deltas_exhaustive,
    swap_experiment,
    total_variation,
)
from lcs_moments.kernel import lcs_length
from lcs_moments.words import SequencePair, Word, validate_dist


def make_pair(xs: str, ys: str) -> SequencePair:
    return SequencePair(
        Word(tuple(int(c) for c in xs)), Word(tuple(int(c) for c in ys))
    )


class TestChainInit:
    def test_binary_alphabet_is_deterministic_word(self):
        d = validate_dist((0.6, 0.4), 1)
        pair = chain_init(d, 6, seed=0)
        assert pair.x.letters == (2,) * 6
        assert pair.y.letters == (2,) * 6

    def test_renormalized_frequencies(self):
        d = validate_dist((0.6, 0.3, 0.1), 1)
        pair = chain_init(d, 50_000, seed=1)
        arr = np.array(pair.x.letters + pair.y.letters)
        freq2 = float((arr == 2).sum() / arr.size)
        # expected 0.75 after renormalization; 6 sigma is ~0.008
        assert abs(freq2 - 0.75) < 0.01
        assert not np.any(arr == 1)

    def test_seed_determinism(self):
        d = validate_dist((0.5, 0.3, 0.2), 1)
        assert chain_init(d, 10, seed=5) == chain_init(d, 10, seed=5)

    def test_point_mass_rejected(self):
        d = validate_dist((1.0,), 1)
        with pytest.raises(Exception):
            chain_init(d, 3, seed=0)


class TestChainStep:
    def test_single_candidate_forced(self):
        pair = make_pair("112", "111")
        out = chain_step(pair, dominant=1, seed=0)
        assert out.x.letters == (1, 1, 1)
        assert out.y.letters == (1, 1, 1)

    def test_uniform_position_choice(self, swap_pair):
        pair = make_pair("112113112131", "131111111131")
        counts = {}
        trials = 12_000
        for s in range(trials):
            out = chain_step(pair, dominant=1, seed=s)
            changed = None
            for strand, before, after in (("x", pair.x, out.x), ("y", pair.y, out.y)):
                for i, (a, b) in enumerate(zip(before.letters, after.letters), 1):
                    if a != b:
                        changed = (strand, i)
            counts[changed] = counts.get(changed, 0) + 1
        assert len(counts) == 6
        expected = trials / 6
        sigma = math.sqrt(trials * (1 / 6) * (5 / 6))
        for c in counts.values():
            assert abs(c - expected) < 6 * sigma

    def test_absorbed_chain_rejected(self):
        pair = make_pair("11", "11")
        with pytest.raises(ValueError):
            chain_step(pair, dominant=1, seed=0)


class TestRunChain:
    def test_terminal_state_all_dominant(self):
        d = validate_dist((0.6, 0.4), 1)
        tr = run_chain(d, 3, seed=9)
        assert tr.lc[-1] == 3
        assert tr.states[-1].x.letters == (1, 1, 1)
        assert len(tr.lc) == 7

    def test_dominant_count_per_step(self):
        d = validate_dist((0.5, 0.3, 0.2), 1)
        tr = run_chain(d, 5, seed=2)
        for k, state in enumerate(tr.states):
            count = sum(1 for c in state.x.letters + state.y.letters if c == 1)
            assert count == k

    def test_steps_move_lc_by_at_most_one(self):
        d = validate_dist((0.6, 0.3, 0.1), 1)
        for seed in range(8):
            tr = run_chain(d, 6, seed=seed)
            assert all(abs(dlt) <= 1 for dlt in tr.deltas)

    def test_lc_matches_kernel(self):
        d = validate_dist((0.6, 0.4), 1)
        tr = run_chain(d, 4, seed=3)
        for state, lc in zip(tr.states, tr.lc):
            assert lc == lcs_length(state.x.letters, state.y.letters)


class TestExactLaws:
    def test_point_masses(self):
        d = validate_dist((0.7, 0.3), 1)
        law = conditional_law_exact(d, 2, k=4)
        assert law == {(1, 1, 1, 1): pytest.approx(1.0)}
        law0 = conditional_law_exact(d, 2, k=0)
        assert law0 == {(2, 2, 2, 2): pytest.approx(1.0)}

    def test_single_dominant_uniform_placement(self):
        d = validate_dist((0.7, 0.3), 1)
        law = conditional_law_exact(d, 2, k=1)
        assert len(law) == 4
        for state, p in law.items():
            assert sum(1 for c in state if c == 1) == 1
            assert p == pytest.approx(0.25)

    @pytest.mark.parametrize("n,probs", [(3, (0.7, 0.3)), (2, (0.6, 0.3, 0.1))])
    def test_chain_law_equals_conditional_law(self, n, probs):
        d = validate_dist(probs, 1)
        for k in range(2 * n + 1):
            tv = total_variation(chain_law_exact(d, n, k), conditional_law_exact(d, n, k))
            assert tv < 1e-10

    def test_chain_law_at_zero_matches_init_law(self):
        d = validate_dist((0.6, 0.3, 0.1), 1)
        law = chain_law_exact(d, 1, 0)
        # two positions, iid renormalized: P(2)=0.75, P(3)=0.25
        assert law[(2, 2)] == pytest.approx(0.5625)
        assert law[(3, 3)] == pytest.approx(0.0625)

    def test_mixture_reproduces_unconditional_law(self):
        import itertools

        d = validate_dist((0.6, 0.3, 0.1), 1)
        n = 2
        from scipy import stats as sps

        mixture = {}
        for k in range(2 * n + 1):
            w = float(sps.binom.pmf(k, 2 * n, 0.6))
            for state, p in chain_law_exact(d, n, k).items():
                mixture[state] = mixture.get(state, 0.0) + w * p
        product = {}
        for state in itertools.product((1, 2, 3), repeat=2 * n):
            p = 1.0
            for c in state:
                p *= d.probs[c - 1]
            product[state] = p
        assert total_variation(mixture, product) < 1e-10

    def test_size_guard(self):
        d = validate_dist((0.7, 0.3), 1)
        with pytest.raises(ValueError):
            conditional_law_exact(d, 12, k=0)


class TestSwapExperiment:
    def test_forced_position_fixture(self, swap_pair):
        pair = make_pair("112113112131", "131111111131")
        out = swap_experiment(pair, dominant=1, seed=0, forced_position=("x", 3))
        assert out.delta == 1

    def test_exhaustive_fixture_probabilities(self):
        pair = make_pair("112113112131", "131111111131")
        outs = swap_deltas_exhaustive(pair, dominant=1)
        assert len(outs) == 6
        plus = sum(1 for o in outs if o.delta == 1)
        minus = sum(1 for o in outs if o.delta == -1)
        assert plus / 6 >= 0.5
        assert minus / 6 <= 1 / 3

    def test_constructed_certain_increase(self):
        pair = make_pair("1121", "1111")
        out = swap_experiment(pair, dominant=1, seed=0)
        assert out.delta == 1

    def test_no_nondominant_rejected(self):
        pair = make_pair("11", "11")
        with pytest.raises(ValueError):
            swap_experiment(pair, dominant=1, seed=0)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(1, 3), min_size=1, max_size=10),
        st.lists(st.integers(1, 3), min_size=1, max_size=10),
        st.integers(0, 999),
    )
    def test_delta_always_bounded(self, xs, ys, seed):
        n = min(len(xs), len(ys))
        pair = SequencePair(Word(tuple(xs[:n])), Word(tuple(ys[:n])))
        if all(c == 1 for c in xs[:n] + ys[:n]):
            return
        out = swap_experiment(pair, dominant=1, seed=seed)
        assert out.delta in (-1, 0, 1)

    def test_forced_position_must_be_nondominant(self):
        pair = make_pair("12", "21")
        with pytest.raises(ValueError):
            swap_experiment(pair, dominant=1, seed=0, forced_position=("x", 1))


class TestConditionalSampling:
    def test_exact_dominant_count(self):
        d = validate_dist((0.6, 0.3, 0.1), 1)
        for k in (0, 3, 8):
            pair = sample_conditional_pair(d, 4, k, seed=k)
            letters = pair.x.letters + pair.y.letters
            assert sum(1 for c in letters if c == 1) == k

    def test_determinism(self):
        d = validate_dist((0.7, 0.3), 1)
        assert sample_conditional_pair(d, 5, 4, seed=1) == sample_conditional_pair(
            d, 5, 4, seed=1
        )

    def test_empirical_law_matches_exact(self):
        d = validate_dist((0.7, 0.3), 1)
        n, k, trials = 2, 1, 40_000
        counts = {}
        for s in range(trials):
            pair = sample_conditional_pair(d, n, k, seed=s)
            state = pair.x.letters + pair.y.letters
            counts[state] = counts.get(state, 0) + 1
        empirical = {s: c / trials for s, c in counts.items()}
        tv = total_variation(empirical, conditional_law_exact(d, n, k))
        assert tv < 0.02


class TestSlopeEvent:
    def test_monotone_trace_zero_slope(self):
        tr = CouplingTrace(
            start_k=0,
            states=(make_pair("2", "2"),) * 5,
            lc=(0, 0, 1, 1, 1),
        )
        assert slope_event(tr, (0, 4), ell=1, c=0.0)

    def test_slope_above_one_impossible_with_gap(self):
        tr = CouplingTrace(
            start_k=0,
            states=(make_pair("2", "2"),) * 5,
            lc=(0, 1, 2, 3, 4),
        )
        assert slope_event(tr, (0, 4), ell=1, c=1.0)
        assert not slope_event(tr, (0, 4), ell=2, c=1.5)

    def test_detects_flat_stretch(self):
        tr = CouplingTrace(
            start_k=0,
            states=(make_pair("2", "2"),) * 5,
            lc=(0, 1, 1, 2, 3),
        )
        assert not slope_event(tr, (0, 4), ell=1, c=0.75)
        assert slope_event(tr, (0, 4), ell=3, c=0.5)
