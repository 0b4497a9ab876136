"""Central-moment machinery for the LCS of two random words.

Submodules:
    words        alphabet distributions, sampling, gap statistics
    kernel       exact LCS: reference DP, bit-parallel kernel, backtracking
    alignment    cell encoding of alignments, scores, breaking, membership
    coupling     dominant-letter insertion chain, exact laws, swap experiment
    bounds       closed-form constants and inequality evaluators
    experiments  Monte Carlo engine and brute-force oracle suite
    reporting    output payloads, CSV rendering, JSON schemas
    cli          the lcs-moments command
"""

from .words import (
    AlphabetDist,
    DistributionError,
    GapStats,
    SequencePair,
    Word,
    gap_statistics,
    geometric_gap_parameter,
    sample_pair,
    stream,
    validate_dist,
    word_from_string,
    word_to_string,
)
from .kernel import (
    CapExceeded,
    MatchedAlignment,
    enumerate_optimal_alignments,
    lcs_backtrack,
    lcs_length,
    lcs_length_fast,
)
from .alignment import (
    AlignmentVector,
    CellDecomposition,
    EnumerationResult,
    Inadmissible,
    InBnResult,
    WeakSideStats,
    break_cell,
    decode,
    decode_best,
    encode_optimal,
    enumerate_admissible,
    in_B_n,
    is_breakable,
    lambda_c,
    weak_side,
)
from .coupling import (
    CouplingTrace,
    SwapOutcome,
    chain_init,
    chain_law_exact,
    chain_step,
    conditional_law_exact,
    run_chain,
    sample_conditional_pair,
    slope_event,
    swap_experiment,
    total_variation,
)
from .bounds import (
    BoundReport,
    TheoremConstants,
    burkholder_tensorized_check,
    conditioned_binomial_moment_window,
    event_probability_bounds,
    geometric_sum_tail,
    moment_upper_bound,
    reversed_lipschitz_bound,
    rough_lcs_lower,
    theorem_constants,
)
from .experiments import (
    ExperimentConfig,
    MomentEstimate,
    OracleReport,
    ScalingFit,
    SwapProbabilityResult,
    chain_law_test,
    estimate_moments,
    oracle_suite,
    sample_lc_values,
    scaling_experiment,
    swap_probability_experiment,
)

__version__ = "0.1.0"
