import itertools
import math

import numpy as np
import pytest


def brute_elem(x, k):
    """Subset-enumeration oracle for e_k."""
    return sum(math.prod(c) for c in itertools.combinations(x, k))


def brute_fixed_point_counts(n):
    """Histogram of the number of fixed points over S_n."""
    counts = [0] * (n + 1)
    for p in itertools.permutations(range(n)):
        counts[sum(p[i] == i for i in range(n))] += 1
    return counts


@pytest.fixture
def rng():
    return np.random.default_rng(20250408)
