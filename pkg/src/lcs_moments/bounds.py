"""Closed-form constants, moment bounds, and probability-bound evaluators.

Everything here is a pure function of its parameters. Many of the probability
bounds only bite for astronomically large n because the constants involved
(K is about 5e-33 for small alphabets) are tiny; each evaluator therefore
returns a vacuity flag alongside the raw value instead of refusing to
evaluate. Empirical verifiers for the desk-checkable inequalities live in the
experiments layer and in the test suite, which keeps the formula code free of
sampling dependencies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=200)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: value plus whether it carries any information."""

    name: str
    inputs: dict
    value: float
    vacuous: bool

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "value": self.value,
            "vacuous": self.vacuous,
        }


def moment_upper_bound(r: float, probs: Sequence[float], n: int) -> float:
    """Generic upper bound on the r-th central moment of the LCS length.

    For r >= 2 the bound is ((r-1)^r / 2) (1 - sum p_k^2) (2n)^(r/2); for
    0 < r <= 2 it is ((1 - sum p_k^2) n)^(r/2). The branches agree at r = 2.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    collision = float(np.square(np.asarray(probs, dtype=float)).sum())
    spread = max(0.0, 1.0 - collision)
    if r >= 2:
        return ((r - 1) ** r / 2.0) * spread * (2.0 * n) ** (r / 2.0)
    return (spread * n) ** (r / 2.0)


def reversed_lipschitz_bound(c: float, ell: float, r: float, m_r_t: float) -> BoundReport:
    """Lower bound (c/2)^r (M_r(T) - ell^r) for M_r(f(T)) under a reversed
    Lipschitz condition f(j) - f(i) >= c (j - i) whenever j >= i + ell."""
    if c <= 0:
        raise ValueError("c must be positive")
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if r < 1:
        raise ValueError("r must be at least 1")
    value = (c / 2.0) ** r * (m_r_t - ell**r)
    return BoundReport(
        name="reversed_lipschitz_lower",
        inputs={"c": c, "ell": ell, "r": r, "m_r_T": m_r_t},
        value=value,
        vacuous=value <= 0.0,
    )


def geometric_sum_tail(N: int, p: float, beta: float) -> float:
    """Bound exp(-(beta - 1 - log beta) N) on P(sum of N geometrics <= beta N / p).

    The geometric variables take values 1, 2, ... with success parameter p;
    the bound does not depend on p.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if N < 1:
        raise ValueError("N must be at least 1")
    return math.exp(-(beta - 1.0 - math.log(beta)) * N)


def burkholder_tensorized_check(
    f: Callable[[tuple], float],
    input_laws: Sequence[Sequence[tuple[float, float]]],
    r: float,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
) -> tuple[float, float]:
    """Both sides of the tensorized moment inequality for f of independent inputs.

    ``input_laws[i]`` lists (value, probability) pairs of coordinate i. Returns
    (lhs, rhs) with lhs = ||S - ES||_r and
    rhs = ((r-1)/2^(1/r)) (sum_i ||S - S_i||_r^2)^(1/2), where S_i resamples
    coordinate i independently. In exact mode lhs <= rhs always holds. Monte
    Carlo mode exists for input spaces too large to enumerate; its estimates
    carry sampling error and are not used as an oracle.
    """
    if r < 2:
        raise ValueError("the inequality is stated for r >= 2")
    laws = [list(law) for law in input_laws]
    d = len(laws)
    if mode == "exact":
        states = list(itertools.product(*[range(len(law)) for law in laws]))
        if len(states) > 2_000_000:
            raise ValueError("input space too large for exact mode")
        values = np.empty(len(states))
        weights = np.empty(len(states))
        assignments = []
        for si, state in enumerate(states):
            xs = tuple(laws[i][j][0] for i, j in enumerate(state))
            w = math.prod(laws[i][j][1] for i, j in enumerate(state))
            values[si] = f(xs)
            weights[si] = w
            assignments.append(xs)
        mean = float(np.dot(weights, values))
        lhs = float(np.dot(weights, np.abs(values - mean) ** r)) ** (1.0 / r)
        total = 0.0
        for i in range(d):
            acc = 0.0
            for si, xs in enumerate(assignments):
                for alt_value, alt_p in laws[i]:
                    repl = xs[:i] + (alt_value,) + xs[i + 1 :]
                    acc += weights[si] * alt_p * abs(values[si] - f(repl)) ** r
            total += acc ** (2.0 / r)
        rhs = ((r - 1) / 2 ** (1.0 / r)) * math.sqrt(total)
        return lhs, rhs
    if mode != "monte-carlo":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    draws = np.empty((samples, d))
    for i, law in enumerate(laws):
        vals = np.array([v for v, _ in law])
        probs = np.array([p for _, p in law])
        draws[:, i] = vals[rng.choice(len(law), size=samples, p=probs)]
    s_vals = np.array([f(tuple(row)) for row in draws])
    mean = s_vals.mean()
    lhs = float(np.mean(np.abs(s_vals - mean) ** r)) ** (1.0 / r)
    total = 0.0
    for i in range(d):
        law = laws[i]
        vals = np.array([v for v, _ in law])
        probs = np.array([p for _, p in law])
        repl = draws.copy()
        repl[:, i] = vals[rng.choice(len(law), size=samples, p=probs)]
        si_vals = np.array([f(tuple(row)) for row in repl])
        total += float(np.mean(np.abs(s_vals - si_vals) ** r)) ** (2.0 / r)
    rhs = ((r - 1) / 2 ** (1.0 / r)) * math.sqrt(total)
    return lhs, rhs


@dataclass(frozen=True)
class TheoremConstants:
    """Every constant of the small-probability lower-bound theorem."""

    m: int
    r: float
    p1: float
    p2: float
    K: float
    K_branch: str  # which branch of the min produced K
    p2_threshold: float
    theta: float
    epsilon: float
    C1: float
    C2_cap: float

    def ell_n(self, n: int) -> float:
        return (
            math.exp(-0.5)
            * math.sqrt(n * self.p1 * (1.0 - self.p1))
            * (1.0 / (1.0 + self.r)) ** (1.0 / self.r)
        )

    def interval_I(self, n: int) -> tuple[float, float]:
        center = 2.0 * n * self.p1
        half = math.sqrt(2.0 * n * (1.0 - self.p1) * self.p1)
        return (center - half, center + half)

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "p1": self.p1,
            "p2": self.p2,
            "K": self.K,
            "K_branch": self.K_branch,
            "p2_threshold": self.p2_threshold,
            "theta": self.theta,
            "epsilon": self.epsilon,
            "C1": self.C1,
            "C2_cap": self.C2_cap,
        }


def theorem_constants(m: int, r: float, p1: float, p2: float) -> TheoremConstants:
    """Evaluate the theorem's constants for an alphabet of size m.

    ``C2_cap`` uses 1 - p1^2 - p2^2, an upper bound on the letter-collision
    spread whatever the remaining m - 2 probabilities are.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not (0 < p1 < 1 or (p1 == 1.0 and m == 1)):
        raise ValueError("p1 must lie in (0, 1)")
    branch_a = 2.0**-4 * 1e-2 * math.exp(-67.0)
    branch_b = 1.0 / (800.0 * m)
    if branch_a <= branch_b:
        K, K_branch = branch_a, "2^-4 1e-2 e^-67"
    else:
        K, K_branch = branch_b, "1/(800 m)"
    p2_threshold = min(2.0**-2 * math.exp(-5.0) * K / m, K / (2.0 * m * m))
    theta = 1.0 / 25.0
    epsilon = 1e-2 * math.exp(-67.0)
    C1 = (
        2.0 ** (-2 - 5 * r)
        * (2.0 ** (r / 2.0) - 1.0)
        * (1.0 + r) ** -1.0
        * math.exp(-0.5)
        * K**r
        * m ** (-r)
        * (1.0 - p1) ** (r / 2.0)
    )
    C2_cap = ((r - 1) ** r / 2.0) * 2.0 ** (r / 2.0) * max(0.0, 1.0 - p1 * p1 - p2 * p2)
    return TheoremConstants(
        m=m, r=r, p1=p1, p2=p2, K=K, K_branch=K_branch,
        p2_threshold=p2_threshold, theta=theta, epsilon=epsilon,
        C1=C1, C2_cap=C2_cap,
    )


def rough_lcs_lower(n: int, p1: float, p2: float) -> dict:
    """Threshold and probability bound of the crude LCS lower-bound event.

    The event is {LC_n >= n p1 + ((1-p2)^3 - p2) n p2^2}; its probability is
    at least 1 - 4 exp(-2 n p2^6) - exp(n (p2^3 + log(1-p2^3)) (p1 - p2^3)).
    """
    if not 0.5 < p1 <= 1.0:
        raise ValueError("p1 must exceed 1/2")
    threshold = n * p1 + ((1.0 - p2) ** 3 - p2) * n * p2**2
    # at p2 = 0 both exponents vanish and the bound degenerates to 1 - 4 - 1
    prob_bound = (
        1.0
        - 4.0 * math.exp(-2.0 * n * p2**6)
        - math.exp(n * (p2**3 + math.log1p(-(p2**3))) * (p1 - p2**3))
    )
    return {
        "threshold": threshold,
        "prob_bound": prob_bound,
        "vacuous": prob_bound <= 0.0,
    }


def f_theta(theta: float) -> float:
    """Entropy-style count factor ((4+2t)/t^2)^t ((2+t)/2)^2 (1/(1-t))^(1-t)."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    return (
        ((4.0 + 2.0 * theta) / theta**2) ** theta
        * ((2.0 + theta) / 2.0) ** 2
        * (1.0 / (1.0 - theta)) ** (1.0 - theta)
    )


def breakable_exponent(p1: float, theta: float) -> float:
    """Exponent 2(1-t)(p1^2/(1+p1^2) - t)^2 - log f(t) of the breakable-cell
    counting bound; the bound is useful only when this is positive."""
    return 2.0 * (1.0 - theta) * (p1**2 / (1.0 + p1**2) - theta) ** 2 - math.log(
        f_theta(theta)
    )


def gaussian_window_integral(r: float = 0.0) -> float:
    """Integral of |x|^r exp(-x^2/2) over [-1, 1] by adaptive quadrature."""
    if r == 0.0:
        value, _ = integrate.quad(lambda t: math.exp(-t * t / 2.0), -1.0, 1.0, **_QUAD_OPTS)
    else:
        value, _ = integrate.quad(
            lambda t: abs(t) ** r * math.exp(-t * t / 2.0), -1.0, 1.0, **_QUAD_OPTS
        )
    return value


def conditioned_binomial_moment_window(n: int, p1: float, r: float) -> dict:
    """Central-window moment bounds for a Binomial(2n, p1) count.

    Returns the normal-approximation error term, the bound on how far the
    window-conditioned mean can drift from 2 n p1, the lower bound on the
    conditioned absolute r-th moment about 2 n p1, and the combined lower
    bound on the conditioned central r-th moment. Every entry carries its own
    vacuity flag since each becomes uninformative for small n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.5 < p1 < 1.0:
        raise ValueError("p1 must lie in (1/2, 1)")
    if r < 1:
        raise ValueError("r must be at least 1")
    sigma2n = math.sqrt(2.0 * n * p1 * (1.0 - p1))
    be = 1.0 / sigma2n
    z0 = gaussian_window_integral(0.0)
    zr = gaussian_window_integral(r)
    shift_denom = z0 / math.sqrt(2.0 * math.pi) - be
    if shift_denom > 0.0:
        mean_shift = 2.0 / shift_denom
        mean_shift_vacuous = False
    else:
        mean_shift = math.inf
        mean_shift_vacuous = True
    err = math.sqrt(math.pi) / math.sqrt(n * p1 * (1.0 - p1))
    abs_moment_ratio = (zr - 2.0 * err) / (z0 + err)
    abs_moment_lower = sigma2n**r * abs_moment_ratio
    inner = sigma2n * max(abs_moment_ratio, 0.0) ** (1.0 / r) - mean_shift
    if abs_moment_ratio > 0.0 and not mean_shift_vacuous and inner > 0.0:
        moment_lower = inner**r
        moment_vacuous = False
    else:
        moment_lower = 0.0
        moment_vacuous = True
    return {
        "berry_esseen_term": be,
        "mean_shift_bound": mean_shift,
        "mean_shift_vacuous": mean_shift_vacuous,
        "abs_moment_lower": abs_moment_lower,
        "abs_moment_vacuous": abs_moment_lower <= 0.0,
        "moment_lower": moment_lower,
        "moment_vacuous": moment_vacuous,
        "window_mass_lower": z0 / math.sqrt(2.0 * math.pi) - be,
    }


def event_probability_bounds(
    n: int, p2: float, K: float, m: int, ell: float, theta: float, p1: float
) -> list[BoundReport]:
    """Evaluate every named probability bound at one parameter point."""
    reports: list[BoundReport] = []
    base_inputs = {"n": n, "p2": p2, "K": K, "m": m, "ell": ell, "theta": theta, "p1": p1}

    def add(name: str, value: float, vacuous: bool, **extra):
        inputs = dict(base_inputs)
        inputs.update(extra)
        reports.append(BoundReport(name=name, inputs=inputs, value=value, vacuous=vacuous))

    swap_prob = 1.0 - 121.0 * math.exp(-n * p2**6 / 5.0)
    add("favorable_swap_set_prob", swap_prob, swap_prob <= 0.0)

    slope_prob = 1.0 - (
        484.0 * math.sqrt(math.pi) * math.e**2 * n * math.exp(-n * p2**6 / 5.0)
        + 2.0 * n * math.exp(-(K**2) * ell / (32.0 * m * m))
    )
    add("slope_event_prob", slope_prob, slope_prob <= 0.0)

    sparse_prob = 1.0 - 5.0 * math.exp(-n * p2**6 / 5.0)
    add("optimal_in_small_cell_set_prob", sparse_prob, sparse_prob <= 0.0)

    exponent = breakable_exponent(p1, theta)
    k0 = max(1, math.ceil(n * p2**2 / 2.0))
    if exponent > 0.0:
        ratio = math.exp(-exponent)
        breakable_prob = 1.0 - math.exp(-exponent * k0) / (1.0 - ratio)
    else:
        breakable_prob = -math.inf
    add(
        "breakable_cells_prob",
        breakable_prob,
        breakable_prob <= 0.0,
        exponent=exponent,
        exponent_positive=exponent > 0.0,
        f_theta=f_theta(theta),
    )

    weak_side_prob = 1.0 - 38.0 * math.exp(-3.0 * n * p2**2 / 200.0)
    add("weak_side_count_prob", weak_side_prob, weak_side_prob <= 0.0)

    few_cells_prob = 1.0 - 4.0 * math.exp(-n * p2**2 / 2.0)
    add("few_cells_prob", few_cells_prob, few_cells_prob <= 0.0)

    be = 1.0 / math.sqrt(2.0 * n * p1 * (1.0 - p1))
    add("berry_esseen_term", be, be >= 1.0)

    hoeffding = math.exp(-(K**2) * ell / (32.0 * m * m))
    add("hoeffding_slope_term", hoeffding, hoeffding >= 1.0)

    return reports


def default_bound_reports(
    probs: Sequence[float],
    dominant_index: int,
    n: int,
    r_values: Sequence[float],
) -> list[BoundReport]:
    """The standard report set the CLI emits for one parameter point."""
    p = list(map(float, probs))
    m = len(p)
    p1 = p[dominant_index - 1]
    others = [q for i, q in enumerate(p, start=1) if i != dominant_index]
    p2 = max(others) if others else 0.0
    reports: list[BoundReport] = []
    for r in r_values:
        value = moment_upper_bound(r, p, n)
        reports.append(
            BoundReport(
                name=f"moment_upper_bound_r{r:g}",
                inputs={"r": r, "probs": p, "n": n},
                value=value,
                vacuous=False,
            )
        )
    for r in r_values:
        tc = theorem_constants(m, r, p1, p2)
        lo, hi = tc.interval_I(n)
        reports.extend(
            [
                BoundReport(f"K_r{r:g}", tc.to_json_dict(), tc.K, False),
                BoundReport(f"p2_threshold_r{r:g}", tc.to_json_dict(), tc.p2_threshold, False),
                BoundReport(f"C1_r{r:g}", tc.to_json_dict(), tc.C1, tc.C1 <= 0.0),
                BoundReport(f"C2_cap_r{r:g}", tc.to_json_dict(), tc.C2_cap, False),
                BoundReport(f"ell_n_r{r:g}", {"n": n, **tc.to_json_dict()}, tc.ell_n(n), False),
                BoundReport(f"interval_I_lo_r{r:g}", {"n": n}, lo, False),
                BoundReport(f"interval_I_hi_r{r:g}", {"n": n}, hi, False),
            ]
        )
        if 0.5 < p1 < 1.0:
            window = conditioned_binomial_moment_window(n, p1, r)
            reports.append(
                BoundReport(
                    f"window_moment_lower_r{r:g}",
                    {"n": n, "p1": p1, "r": r},
                    window["moment_lower"],
                    window["moment_vacuous"],
                )
            )
        if p2 > 0.0 and 0.5 < p1 < 1.0:
            ell = theorem_constants(m, r, p1, p2).ell_n(n)
            reports.extend(
                event_probability_bounds(n, p2, tc.K, m, ell, tc.theta, p1)
            )
    if 0.5 < p1 <= 1.0 and p2 >= 0.0:
        rough = rough_lcs_lower(n, p1, p2)
        reports.append(
            BoundReport(
                "rough_lcs_threshold", {"n": n, "p1": p1, "p2": p2},
                rough["threshold"], False,
            )
        )
        reports.append(
            BoundReport(
                "rough_lcs_prob_bound", {"n": n, "p1": p1, "p2": p2},
                rough["prob_bound"], rough["vacuous"],
            )
        )
    if p2 > 0.0:
        N = max(1, math.ceil(n * p2**2 / 2.0))
        tail = geometric_sum_tail(N, p1 / (p1 + p2), 0.5)
        reports.append(
            BoundReport(
                "geometric_sum_tail_beta0.5",
                {"N": N, "p": p1 / (p1 + p2), "beta": 0.5},
                tail,
                tail >= 1.0,
            )
        )
    return reports
