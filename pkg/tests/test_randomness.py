import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from restrictlab.linalg import InputError
from restrictlab.randomness import (
    RngHandle,
    SubsetSample,
    rademacher,
    sample_fixed,
    sample_independent,
    sample_subset,
)


def test_independent_extremes():
    assert list(sample_independent(7, 1.0, RngHandle(1)).indices) == list(range(7))
    assert len(sample_independent(7, 0.0, RngHandle(1))) == 0


def test_independent_rejects_bad_delta():
    for d in (-0.1, 1.5):
        with pytest.raises(InputError):
            sample_independent(5, d, RngHandle(0))


def test_independent_mean_size():
    trials = 10_000
    sizes = np.array([len(sample_independent(1000, 0.3, RngHandle(11, t))) for t in range(trials)])
    tol = 3 * math.sqrt(1000 * 0.3 * 0.7 / trials)
    assert abs(sizes.mean() - 300) <= tol


def test_fixed_extremes_and_errors():
    assert list(sample_fixed(6, 6, RngHandle(2)).indices) == list(range(6))
    assert len(sample_fixed(6, 0, RngHandle(2))) == 0
    with pytest.raises(InputError):
        sample_fixed(4, 5, RngHandle(2))


def test_fixed_is_uniform_over_subsets():
    trials = 100_000
    g = RngHandle(5).generator()
    counts = dict.fromkeys(itertools.combinations(range(5), 2), 0)
    for _ in range(trials):
        counts[tuple(sample_fixed(5, 2, g).indices)] += 1
    for c in counts.values():
        assert abs(c / trials - 0.1) <= 0.005


def test_rademacher():
    assert rademacher(0, RngHandle(0)).size == 0
    a = rademacher(50, RngHandle(123, 4))
    b = rademacher(50, RngHandle(123, 4))
    assert np.array_equal(a, b)
    assert set(np.unique(a)) <= {-1.0, 1.0}
    assert abs(rademacher(10**6, RngHandle(9)).mean()) <= 0.004


def test_streams_differ():
    a = RngHandle(7, 0).generator().random(8)
    b = RngHandle(7, 1).generator().random(8)
    assert not np.array_equal(a, b)


def test_handle_range():
    with pytest.raises(InputError):
        RngHandle(-1)
    with pytest.raises(InputError):
        RngHandle(2**64)


def test_sample_subset_dispatch():
    s = sample_subset(10, "fixed", 4, RngHandle(0))
    assert s.scheme == "fixed" and len(s) == 4
    s = sample_subset(10, "selectors", 4, RngHandle(0))
    assert s.scheme == "selectors" and s.param == pytest.approx(0.4)
    with pytest.raises(InputError):
        sample_subset(10, "poisson", 4, RngHandle(0))


def test_subset_sample_validates_order():
    with pytest.raises(InputError):
        SubsetSample(np.array([2, 1]), 4, "fixed", 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.data(), st.integers(0, 2**64 - 1))
def test_fixed_size_invariants(N, data, seed):
    n = data.draw(st.integers(0, N))
    s = sample_fixed(N, n, RngHandle(seed))
    assert len(s) == n
    assert np.all(np.diff(s.indices) > 0)
    assert np.array_equal(s.indices, sample_fixed(N, n, RngHandle(seed)).indices)
