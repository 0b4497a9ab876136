"""Monte Carlo engine: moment estimation, scaling fits, swap and law tests.

Replicate i of any experiment draws from the counter-based stream
``(seed, i)``, so results are a pure function of the configuration and do not
depend on how replicates are scheduled across workers; reruns with different
thread counts produce byte-identical output files. Bootstrap resampling uses
a reserved stream lane of its own.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import stats as sps

from . import alignment, coupling
from .bounds import theorem_constants
from .kernel import lcs_length, lcs_length_fast, match_masks
from .words import (
    AlphabetDist,
    SequencePair,
    Word,
    letters_of,
    sample_pair_arrays,
    stream,
    validate_dist,
    word_to_string,
)

_BOOT_LANE = 1 << 48
_DEFAULT_BOOTSTRAP = 1000

KINDS = ("moments", "scaling", "swap", "chain-law", "bounds", "oracle")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class DegenerateDataError(RuntimeError):
    """Raised when a fit is requested on constant (zero-moment) data."""


@dataclass
class ExperimentConfig:
    kind: str = "moments"
    dist: tuple[float, ...] = (0.9, 0.1)
    dominant: int = 1
    n: int | None = 256
    n_grid: tuple[int, ...] | None = None
    replicates: int = 1000
    r_values: tuple[float, ...] = (1.0, 2.0)
    seed: int = 0
    threads: int = 1
    out: str | None = None
    format: str = "json"
    bn_stratify: bool = False
    bn_K: float | None = None
    emit_distribution: bool = False

    def __post_init__(self):
        self.dist = tuple(float(p) for p in self.dist)
        self.r_values = tuple(float(r) for r in self.r_values)
        if self.n_grid is not None:
            self.n_grid = tuple(int(v) for v in self.n_grid)

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if any(r <= 0 for r in self.r_values):
            raise ConfigError("r values must be positive")
        if self.n_grid is not None:
            if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
                raise ConfigError("n_grid must be strictly increasing")
        if self.n is None and self.n_grid is None:
            raise ConfigError("one of n or n_grid is required")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        validate_dist(self.dist, self.dominant)
        return self

    def alphabet(self) -> AlphabetDist:
        return validate_dist(self.dist, self.dominant)

    def sizes(self) -> tuple[int, ...]:
        return self.n_grid if self.n_grid is not None else (int(self.n),)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dist"] = list(self.dist)
        d["r_values"] = list(self.r_values)
        d["n_grid"] = list(self.n_grid) if self.n_grid is not None else None
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class MomentEstimate:
    n: int
    r: float
    mean_lc: float
    m_r_hat: float
    se: float
    ci99: tuple[float, float]
    gamma_hat: float


@dataclass(frozen=True)
class ScalingFit:
    r: float
    n_grid: tuple[int, ...]
    m_r_hats: tuple[float, ...]
    slope: float
    slope_ci: tuple[float, float]
    intercept: float
    residuals: tuple[float, ...]


def _lc_batch(args) -> list[int]:
    probs, dominant, n, seed, start, stop = args
    dist = AlphabetDist(probs, dominant)
    out = []
    for i in range(start, stop):
        xa, ya = sample_pair_arrays(dist, n, seed, i)
        out.append(lcs_length_fast(xa, ya))
    return out


def _chunk_ranges(total: int, chunks: int) -> list[tuple[int, int]]:
    size = max(1, math.ceil(total / chunks))
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def sample_lc_values(
    dist: AlphabetDist, n: int, replicates: int, seed: int, threads: int = 1
) -> np.ndarray:
    """LCS lengths of ``replicates`` independent pairs; replicate i uses
    stream (seed, i) so the result is identical for any thread count."""
    args = [
        (dist.probs, dist.dominant_index, n, seed, lo, hi)
        for lo, hi in _chunk_ranges(replicates, threads * 4)
    ]
    if threads > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_lc_batch, args))
    else:
        parts = [_lc_batch(a) for a in args]
    return np.asarray([v for part in parts for v in part], dtype=np.int64)


def _bootstrap_central_moments(
    values: np.ndarray, r_values, rng: np.random.Generator, resamples: int = _DEFAULT_BOOTSTRAP
) -> dict[float, np.ndarray]:
    n = values.size
    boots = {r: np.empty(resamples) for r in r_values}
    block = max(1, min(200, (10_000_000 // max(n, 1)) or 1))
    done = 0
    while done < resamples:
        b = min(block, resamples - done)
        idx = rng.integers(0, n, size=(b, n))
        sample = values[idx]
        means = sample.mean(axis=1, keepdims=True)
        dev = np.abs(sample - means)
        for r in r_values:
            boots[r][done : done + b] = (dev**r).mean(axis=1)
        done += b
    return boots


def central_moment(values: np.ndarray, r: float) -> float:
    dev = np.abs(values - values.mean())
    return float((dev**r).mean())


def estimate_moments(cfg: ExperimentConfig) -> list[MomentEstimate]:
    """Plug-in central absolute moments with bootstrap uncertainty."""
    cfg.validate()
    dist = cfg.alphabet()
    out: list[MomentEstimate] = []
    for point, n in enumerate(cfg.sizes()):
        values = sample_lc_values(dist, n, cfg.replicates, cfg.seed, cfg.threads)
        mean = float(values.mean())
        boot_rng = stream(cfg.seed, _BOOT_LANE, point)
        boots = _bootstrap_central_moments(values, cfg.r_values, boot_rng)
        for r in cfg.r_values:
            m_r = central_moment(values, r)
            boot = boots[r]
            lo, hi = np.percentile(boot, [0.5, 99.5])
            # percentile interval widened to contain the point estimate
            out.append(
                MomentEstimate(
                    n=n,
                    r=r,
                    mean_lc=mean,
                    m_r_hat=m_r,
                    se=float(boot.std(ddof=1)),
                    ci99=(min(float(lo), m_r), max(float(hi), m_r)),
                    gamma_hat=mean / n,
                )
            )
    return out


def scaling_experiment(cfg: ExperimentConfig) -> tuple[list[MomentEstimate], list[ScalingFit]]:
    """Log-log slope of the central moment against word length."""
    cfg.validate()
    if cfg.n_grid is None or len(cfg.n_grid) < 4:
        raise ConfigError("scaling requires an n_grid with at least 4 points")
    dist = cfg.alphabet()
    sizes = cfg.sizes()
    all_values: list[np.ndarray] = []
    boot_per_point: list[dict[float, np.ndarray]] = []
    for point, n in enumerate(sizes):
        values = sample_lc_values(dist, n, cfg.replicates, cfg.seed, cfg.threads)
        all_values.append(values)
        boot_rng = stream(cfg.seed, _BOOT_LANE, point)
        boot_per_point.append(_bootstrap_central_moments(values, cfg.r_values, boot_rng))
    estimates = []
    fits = []
    log_n = np.log(np.asarray(sizes, dtype=float))
    for r in cfg.r_values:
        m_r = np.array([central_moment(v, r) for v in all_values])
        if np.any(m_r <= 0.0):
            raise DegenerateDataError(
                f"central moment r={r} vanished on some grid point; no fit possible"
            )
        slope, intercept = np.polyfit(log_n, np.log(m_r), 1)
        residuals = np.log(m_r) - (slope * log_n + intercept)
        boot_matrix = np.stack([boot_per_point[i][r] for i in range(len(sizes))])
        valid = np.all(boot_matrix > 0.0, axis=0)
        boot_slopes = np.polyfit(log_n, np.log(boot_matrix[:, valid]), 1)[0]
        lo, hi = np.percentile(boot_slopes, [0.5, 99.5])
        for i, n in enumerate(sizes):
            boot = boot_per_point[i][r]
            blo, bhi = np.percentile(boot, [0.5, 99.5])
            estimates.append(
                MomentEstimate(
                    n=n,
                    r=r,
                    mean_lc=float(all_values[i].mean()),
                    m_r_hat=float(m_r[i]),
                    se=float(boot.std(ddof=1)),
                    ci99=(min(float(blo), float(m_r[i])), max(float(bhi), float(m_r[i]))),
                    gamma_hat=float(all_values[i].mean()) / n,
                )
            )
        fits.append(
            ScalingFit(
                r=r,
                n_grid=tuple(sizes),
                m_r_hats=tuple(float(v) for v in m_r),
                slope=float(slope),
                slope_ci=(float(lo), float(hi)),
                intercept=float(intercept),
                residuals=tuple(float(v) for v in residuals),
            )
        )
    return estimates, fits


def _swap_batch(args) -> list[tuple[int, int]]:
    """Per replicate: (delta, had_nondominant)."""
    probs, dominant, n, seed, start, stop = args
    dist = AlphabetDist(probs, dominant)
    out = []
    for i in range(start, stop):
        rng = stream(seed, i)
        cum = np.cumsum(dist.probs)
        cum[-1] = 1.0
        letters = np.searchsorted(cum, rng.random(2 * n), side="right").astype(np.int64) + 1
        xa, ya = letters[:n], letters[n:]
        nd = np.flatnonzero(letters != dominant)
        if nd.size == 0:
            out.append((0, 0))
            continue
        pos = int(nd[int(rng.integers(0, nd.size))])
        before = lcs_length_fast(xa, ya)
        letters2 = letters.copy()
        letters2[pos] = dominant
        after = lcs_length_fast(letters2[:n], letters2[n:])
        out.append((after - before, 1))
    return out


@dataclass(frozen=True)
class SwapProbabilityResult:
    n: int
    replicates: int
    counts: dict[int, int]
    skipped: int
    p_plus: float
    p_plus_ci: tuple[float, float]
    p_minus: float
    p_minus_ci: tuple[float, float]
    p_zero: float
    diff: float
    diff_ci: tuple[float, float]
    conditional_on_bn: dict | None = None


_Z99 = 2.5758293035489004  # two-sided 99% normal quantile


def _proportion_ci(count: int, total: int) -> tuple[float, float]:
    p = count / total
    half = _Z99 * math.sqrt(max(p * (1.0 - p), 0.0) / total)
    return (max(0.0, p - half), min(1.0, p + half))


def swap_probability_experiment(cfg: ExperimentConfig) -> SwapProbabilityResult:
    """Estimate the probabilities that one favorable swap moves the LCS."""
    cfg.validate()
    dist = cfg.alphabet()
    if dist.m < 2:
        raise ConfigError("swap experiment needs a non-dominant letter")
    n = int(cfg.n if cfg.n is not None else cfg.sizes()[0])
    args = [
        (dist.probs, dist.dominant_index, n, cfg.seed, lo, hi)
        for lo, hi in _chunk_ranges(cfg.replicates, cfg.threads * 4)
    ]
    if cfg.threads > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(_swap_batch, args))
    else:
        parts = [_swap_batch(a) for a in args]
    deltas = [d for part in parts for d, ok in part if ok]
    skipped = cfg.replicates - len(deltas)
    total = len(deltas)
    counts = {d: deltas.count(d) for d in (-1, 0, 1)}
    p_plus = counts[1] / total
    p_minus = counts[-1] / total
    diff = p_plus - p_minus
    var_diff = max(p_plus + p_minus - diff**2, 0.0) / total
    half = _Z99 * math.sqrt(var_diff)
    conditional = None
    if cfg.bn_stratify:
        conditional = _bn_stratified(cfg, dist, n)
    return SwapProbabilityResult(
        n=n,
        replicates=cfg.replicates,
        counts=counts,
        skipped=skipped,
        p_plus=p_plus,
        p_plus_ci=_proportion_ci(counts[1], total),
        p_minus=p_minus,
        p_minus_ci=_proportion_ci(counts[-1], total),
        p_zero=counts[0] / total,
        diff=diff,
        diff_ci=(diff - half, diff + half),
        conditional_on_bn=conditional,
    )


def _bn_stratified(cfg: ExperimentConfig, dist: AlphabetDist, n: int) -> dict:
    """Swap deltas stratified by favorable-swap set membership (desk scale)."""
    K = cfg.bn_K
    if K is None:
        p_sorted = sorted(
            (p for i, p in enumerate(dist.probs, 1) if i != dist.dominant_index),
            reverse=True,
        )
        K = theorem_constants(dist.m, 2.0, dist.p_dominant, p_sorted[0]).K
    inside: list[int] = []
    outside: list[int] = []
    heuristic = 0
    for i in range(cfg.replicates):
        rng = stream(cfg.seed, i)
        cum = np.cumsum(dist.probs)
        cum[-1] = 1.0
        letters = np.searchsorted(cum, rng.random(2 * n), side="right").astype(np.int64) + 1
        xa, ya = letters[:n], letters[n:]
        nd = np.flatnonzero(letters != dist.dominant_index)
        if nd.size == 0:
            continue
        pos = int(nd[int(rng.integers(0, nd.size))])
        before = lcs_length_fast(xa, ya)
        letters2 = letters.copy()
        letters2[pos] = dist.dominant_index
        delta = lcs_length_fast(letters2[:n], letters2[n:]) - before
        member = alignment.in_B_n(
            xa, ya, K, dist.m, search_budget=2000, dominant=dist.dominant_index
        )
        if not member.exhaustive:
            heuristic += 1
        (inside if member.member else outside).append(delta)
    def summarize(ds: list[int]) -> dict:
        if not ds:
            return {"count": 0, "p_plus": None, "p_minus": None}
        return {
            "count": len(ds),
            "p_plus": ds.count(1) / len(ds),
            "p_minus": ds.count(-1) / len(ds),
        }
    return {
        "K": K,
        "in_bn": summarize(inside),
        "out_bn": summarize(outside),
        "heuristic_classifications": heuristic,
    }


def chain_law_test(cfg: ExperimentConfig) -> dict:
    """Exact total-variation comparison of the chain law and conditional law."""
    cfg.validate()
    dist = cfg.alphabet()
    n = int(cfg.n if cfg.n is not None else cfg.sizes()[0])
    if dist.m ** (2 * n) > 10_000:
        raise ConfigError("chain-law test is exact; use n <= 4 and m <= 3")
    tvs = {}
    mixture: dict[tuple[int, ...], float] = {}
    for k in range(2 * n + 1):
        chain = coupling.chain_law_exact(dist, n, k)
        cond = coupling.conditional_law_exact(dist, n, k)
        tvs[k] = coupling.total_variation(chain, cond)
        w = float(sps.binom.pmf(k, 2 * n, dist.p_dominant))
        for state, p in chain.items():
            mixture[state] = mixture.get(state, 0.0) + w * p
    product: dict[tuple[int, ...], float] = {}
    import itertools as _it

    for state in _it.product(range(1, dist.m + 1), repeat=2 * n):
        p = 1.0
        for c in state:
            p *= dist.probs[c - 1]
        product[state] = p
    mixture_tv = coupling.total_variation(mixture, product)
    return {
        "n": n,
        "tv_distances": {str(k): tvs[k] for k in sorted(tvs)},
        "max_tv": max(tvs.values()),
        "mixture_tv": mixture_tv,
    }


@dataclass(frozen=True)
class OracleCheck:
    name: str
    passed: bool
    cases: int
    detail: str = ""
    counterexample: dict | None = None


@dataclass(frozen=True)
class OracleReport:
    checks: tuple[OracleCheck, ...]
    budget_exhausted: bool = False

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "budget_exhausted": self.budget_exhausted,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "cases": c.cases,
                    "detail": c.detail,
                    "counterexample": c.counterexample,
                }
                for c in self.checks
            ],
        }


FIXTURE_PAIR_A = ("1213131112", "1113121112")
FIXTURE_PAIR_BREAK = ("1121131123", "112131113")
FIXTURE_PAIR_SWAP = ("112113112131", "131111111131")


def _pair_example(xa, ya) -> dict:
    return {"x": word_to_string(xa), "y": word_to_string(ya)}


def _fixture_checks() -> list[OracleCheck]:
    checks = []
    xa = [int(c) for c in FIXTURE_PAIR_A[0]]
    ya = [int(c) for c in FIXTURE_PAIR_A[1]]
    ok = lcs_length(xa, ya) == 8
    d1 = alignment.decode(xa, ya, (-1, 0))
    d2 = alignment.decode(xa, ya, (0, -1))
    ok = (
        ok
        and not isinstance(d1, alignment.Inadmissible)
        and not isinstance(d2, alignment.Inadmissible)
        and alignment.lambda_c(d1) == 8
        and alignment.lambda_c(d2) == 8
    )
    checks.append(
        OracleCheck(
            name="two_cell_example_scores",
            passed=ok,
            cases=3,
            detail="length 8 with both (-1,0) and (0,-1) encodings",
        )
    )

    xb = [int(c) for c in FIXTURE_PAIR_BREAK[0]]
    yb = [int(c) for c in FIXTURE_PAIR_BREAK[1]]
    db = alignment.decode(xb, yb, (0, 0))
    ok = not isinstance(db, alignment.Inadmissible)
    if ok:
        base = alignment.lambda_c(db)
        ok = alignment.is_breakable(xb, yb, db, 2) and not alignment.is_breakable(xb, yb, db, 1)
        broken = alignment.break_cell(xb, yb, (0, 0), 2)
        dbb = alignment.decode_best(xb, yb, broken)
        ok = ok and broken == (0, 1, -1) and alignment.lambda_c(dbb) == base
    checks.append(
        OracleCheck(
            name="balanced_cell_break",
            passed=ok,
            cases=3,
            detail="(0,0) -> (0,1,-1) with score preserved",
        )
    )

    xs = Word(tuple(int(c) for c in FIXTURE_PAIR_SWAP[0]))
    ys = Word(tuple(int(c) for c in FIXTURE_PAIR_SWAP[1]))
    outcomes = coupling.swap_deltas_exhaustive(SequencePair(xs, ys), dominant=1)
    plus = sum(1 for o in outcomes if o.delta == 1)
    minus = sum(1 for o in outcomes if o.delta == -1)
    ok = len(outcomes) == 6 and plus / 6 >= 0.5 and minus / 6 <= 1 / 3
    checks.append(
        OracleCheck(
            name="swap_example_probabilities",
            passed=ok,
            cases=6,
            detail=f"p_plus={plus}/6, p_minus={minus}/6",
        )
    )
    return checks


_ORACLE_DISTS = ((0.6, 0.2, 0.2), (1 / 3, 1 / 3, 1 / 3), (0.5, 0.3, 0.2))


def oracle_suite(cfg: ExperimentConfig, fast_kernel=None) -> OracleReport:
    """Brute-force cross-checks of the kernels and the cell encoding."""
    cfg.validate()
    if fast_kernel is None:
        fast_kernel = lcs_length_fast
    checks = list(_fixture_checks())
    budget_exhausted = False
    rng = stream(cfg.seed, 71)

    # enumeration maximum matches the DP length
    cases = 0
    counter = None
    reps = max(50, cfg.replicates // 4)
    for trial in range(reps):
        probs = _ORACLE_DISTS[trial % len(_ORACLE_DISTS)]
        dist = validate_dist(probs, 1)
        n = int(rng.integers(1, 11))
        xa, ya = sample_pair_arrays(dist, n, cfg.seed, 72, trial)
        res = alignment.enumerate_admissible(xa, ya, budget=200_000)
        if not res.complete:
            budget_exhausted = True
        cases += 1
        if res.max_score() != lcs_length(xa, ya):
            counter = _pair_example(xa, ya)
            break
    checks.append(
        OracleCheck(
            name="enumeration_max_equals_dp",
            passed=counter is None,
            cases=cases,
            counterexample=counter,
        )
    )

    # fast kernel against the reference DP
    cases = 0
    counter = None
    for trial in range(max(100, cfg.replicates)):
        m = (2, 4, 8)[trial % 3]
        probs = tuple(1.0 / m for _ in range(m))
        dist = validate_dist(probs, 1)
        n = int(np.exp(rng.uniform(0.0, np.log(256.0))))
        n = max(1, n)
        xa, ya = sample_pair_arrays(dist, n, cfg.seed, 73, trial)
        cases += 1
        if fast_kernel(xa, ya) != lcs_length(xa, ya):
            counter = _pair_example(xa, ya)
            break
    checks.append(
        OracleCheck(
            name="fast_kernel_equals_reference",
            passed=counter is None,
            cases=cases,
            counterexample=counter,
        )
    )

    # breaking preserves the score of optimal vectors
    cases = 0
    counter = None
    for trial in range(max(50, cfg.replicates // 4)):
        probs = _ORACLE_DISTS[trial % len(_ORACLE_DISTS)]
        dist = validate_dist(probs, 1)
        n = int(rng.integers(4, 33))
        xa, ya = sample_pair_arrays(dist, n, cfg.seed, 74, trial)
        target = lcs_length(xa, ya)
        v = alignment.encode_optimal(xa, ya)
        d = alignment.decode_best(xa, ya, v)
        if isinstance(d, alignment.Inadmissible) or alignment.lambda_c(d) != target:
            counter = _pair_example(xa, ya)
            break
        for i in range(1, d.k + 1):
            if d.v[i - 1] != 0 or not alignment.is_breakable(xa, ya, d, i):
                continue
            broken = alignment.break_cell(xa, ya, d.v, i)
            db = alignment.decode_best(xa, ya, broken)
            cases += 1
            if isinstance(db, alignment.Inadmissible) or alignment.lambda_c(db) != target:
                counter = _pair_example(xa, ya)
                break
        if counter:
            break
    checks.append(
        OracleCheck(
            name="break_preserves_score",
            passed=counter is None,
            cases=cases,
            counterexample=counter,
        )
    )

    # single-letter change moves the length by at most one (exhaustive, small)
    cases = 0
    counter = None
    for n in range(1, 5):
        for xa in _all_words(n, 2):
            for ya in _all_words(n, 2):
                base = lcs_length(xa, ya)
                for strand, arr in (("x", xa), ("y", ya)):
                    for pos in range(n):
                        mutated = list(arr)
                        mutated[pos] = 3 - mutated[pos]
                        other = ya if strand == "x" else xa
                        new = (
                            lcs_length(mutated, other)
                            if strand == "x"
                            else lcs_length(other, mutated)
                        )
                        cases += 1
                        if abs(new - base) > 1:
                            counter = {"x": word_to_string(xa), "y": word_to_string(ya)}
        if counter:
            break
    checks.append(
        OracleCheck(
            name="single_change_bounded",
            passed=counter is None,
            cases=cases,
            counterexample=counter,
        )
    )
    return OracleReport(checks=tuple(checks), budget_exhausted=budget_exhausted)


def _all_words(n: int, m: int) -> list[list[int]]:
    import itertools as _it

    return [list(w) for w in _it.product(range(1, m + 1), repeat=n)]


def lc_distribution(values: np.ndarray) -> dict[str, int]:
    uniq, counts = np.unique(values, return_counts=True)
    return {str(int(v)): int(c) for v, c in zip(uniq, counts)}
