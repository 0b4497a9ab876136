import numpy as np
import pytest

from lcs_moments.words import Word, validate_dist


def word_of(text: str) -> list[int]:
    return [int(c) for c in text]


@pytest.fixture
def two_cell_pair():
    # worked two-cell example: LCS length 8, encodings (-1,0) and (0,-1)
    return word_of("1213131112"), word_of("1113121112")


@pytest.fixture
def break_pair():
    # worked breakable-cell example: (0,0) splits into (0,1,-1)
    return word_of("1121131123"), word_of("112131113")


@pytest.fixture
def swap_pair():
    # worked swap example: 6 non-dominant letters, 3 favorable
    return word_of("112113112131"), word_of("131111111131")


@pytest.fixture
def biased_dist():
    return validate_dist((0.9, 0.1), 1)


@pytest.fixture
def ternary_dist():
    return validate_dist((0.6, 0.3, 0.1), 1)


def random_word(rng: np.random.Generator, n: int, m: int) -> list[int]:
    return rng.integers(1, m + 1, size=n).tolist()


def exact_central_moment(values, probs, r: float) -> float:
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    mean = float(np.dot(probs, values))
    return float(np.dot(probs, np.abs(values - mean) ** r))
