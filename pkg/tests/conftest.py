import numpy as np
import pytest


def naive_windows(values, eps):
    """All-pairs O(N^2) influence windows; the independent oracle for the
    two-pointer sweep."""
    values = list(values)
    n = len(values)
    lo = []
    hi = []
    for k in range(n):
        members = [l for l in range(n) if abs(values[l] - values[k]) <= eps]
        lo.append(min(members))
        hi.append(max(members))
    return lo, hi


def naive_increments(values, h, eps):
    """Direct evaluation of the update summand, no prefix sums."""
    lo, hi = naive_windows(values, eps)
    return [
        h * sum(values[lo[k] : hi[k] + 1]) / (hi[k] - lo[k] + 1)
        for k in range(len(values))
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
