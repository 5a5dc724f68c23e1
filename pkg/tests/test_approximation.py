import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import svd_norm
from restrictlab.approximation import (
    BERNOULLI,
    ONE,
    ZERO,
    alpha_projection_refuter,
    approximation_error,
    build_delta,
    check_rudelson_inequality,
    counterexample_lower_bound,
    estimate_mean_error,
    estimate_tail,
    make_sampler,
    projection_error_closed_form,
    projection_error_direct,
    random_low_rank_diagonal,
    rank_statistics,
    sigma_from_counts,
    stripped_bound,
    tail_bound,
    tail_constant_needed,
)
from restrictlab.linalg import DenseOperator, InputError, gram, spectral_norm
from restrictlab.operators import make_block, make_identity, make_modified_block, make_untf
from restrictlab.randomness import RngHandle


def test_zero_column_never_selected():
    a = np.random.default_rng(0).standard_normal((3, 6))
    a[:, 2] = 0
    u = DenseOperator(a)
    for t in range(200):
        assert build_delta(u, 2, RngHandle(1, t))[2] == 0
    assert make_sampler(u, 2).cases[2] == ZERO


def test_untf_two_point_law():
    u = make_untf(4, 16)
    n = 8
    s = make_sampler(u, n)
    assert set(s.cases) == {BERNOULLI}
    assert np.allclose(s.prob, n / 16) and np.allclose(s.value, 16 / n)
    values = np.concatenate([build_delta(u, n, RngHandle(2, t)) for t in range(2000)])
    assert np.all((values == 0) | np.isclose(values, 2.0, rtol=1e-12))
    assert abs(np.mean(values > 0) - 0.5) <= 3 * math.sqrt(0.25 / values.size)


def test_identity_large_n_is_exact():
    u = make_identity(5)
    s = make_sampler(u, 6)
    assert set(s.cases) == {ONE}
    d = build_delta(u, 6, RngHandle(0))
    assert np.array_equal(d, np.ones(5))
    r = estimate_mean_error(u, 6, trials=20)
    assert r.error.mean == 0
    assert r.rank.mean == 5 and r.rank.maximum == 5


def test_zero_operator():
    u = DenseOperator(np.zeros((2, 4)))
    assert np.array_equal(build_delta(u, 3, RngHandle(0)), np.zeros(4))
    assert rank_statistics(u, 3, trials=10)["max"] == 0


def test_sampler_rejects_small_n():
    with pytest.raises(InputError):
        make_sampler(make_identity(3), 0.5)


def test_error_examples():
    b = make_block(2, 2)
    assert approximation_error(b, np.ones(4)) == 0
    assert approximation_error(b, np.zeros(4)) == pytest.approx(spectral_norm(b) ** 2)
    assert approximation_error(b, [2, 0, 0, 2]) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(InputError):
        approximation_error(b, [1, 1])


def test_error_matches_definition():
    a = np.random.default_rng(4).standard_normal((3, 7))
    d = np.random.default_rng(5).uniform(0, 2, 7)
    u = DenseOperator(a)
    direct = svd_norm(a @ np.diag(d - 1) @ a.T)
    assert approximation_error(u, d) == pytest.approx(direct, rel=1e-10)


def test_rank_statistics_untf():
    r = rank_statistics(make_untf(16, 64), 16, trials=2000, seed=1)
    assert r["expected"] == pytest.approx(16.0)
    assert abs(r["mean"] - 16) <= 3 * math.sqrt(64 * 0.25 * 0.75 / 2000)
    assert r["mean"] <= r["limit"] + 3 * r["stderr"]
    assert sum(r["histogram"].values()) == 2000


def test_mean_error_report():
    r = estimate_mean_error(make_block(8, 8), 32, trials=300, seed=2, constant=1.0)
    assert r.bound == pytest.approx(math.sqrt(math.log(32)) * math.sqrt(8 / 32))
    assert r.ratio == pytest.approx(r.error.mean / r.bound)
    assert r.side_condition_ok is True
    assert r.K == pytest.approx(4.0)
    same = estimate_mean_error(make_block(8, 8), 32, trials=300, seed=2, threads=3)
    assert same.records == r.records


def test_unbiased_weighted_gram():
    a = np.random.default_rng(6).standard_normal((4, 10))
    u = DenseOperator(a)
    n, T = 4, 4000
    s = make_sampler(u, n)
    acc = np.zeros((4, 4))
    for t in range(T):
        acc += (a * s.realize(RngHandle(7, t))) @ a.T
    mean = acc / T
    var_j = s.prob * s.value**2 - 1.0
    sd = np.sqrt(np.einsum("ij,kj,j->ik", a**2, a**2, np.maximum(var_j, 0)))
    assert np.all(np.abs(mean - a @ a.T) <= 3 * sd / math.sqrt(T) + 1e-12)


def test_tail_report():
    u = make_untf(8, 32)
    rep = estimate_tail(u, 24, 1.0, [0.1, 0.5, 0.9], trials=300, seed=3)
    surv = [p["survival"] for p in rep.points]
    assert all(a >= b for a, b in zip(surv, surv[1:]))
    assert all(0 <= s <= 1 for s in surv)
    assert rep.eps == pytest.approx(stripped_bound(24, 8.0))
    assert tail_bound(1e-9, rep.eps) == pytest.approx(3.0)
    for bad in ([0.0], [1.0], [-0.2, 0.5]):
        with pytest.raises(InputError):
            estimate_tail(u, 24, 1.0, bad, trials=10)


def test_tail_all_ones_regime():
    rep = estimate_tail(make_identity(4), 8, 1.0, [0.01, 0.5], trials=50)
    assert all(p["survival"] == 0 for p in rep.points)


def test_tail_constant_needed_is_tight():
    u = make_untf(8, 32)
    rep = estimate_tail(u, 24, 1.0, [0.2, 0.4], trials=400, seed=5)
    errors = [e for _, e in rep.records]
    c = tail_constant_needed(errors, 24, 8.0, [0.2, 0.4])
    at = estimate_tail(u, 24, c * (1 + 1e-9), [0.2, 0.4], trials=400, seed=5)
    below = estimate_tail(u, 24, c * 0.99, [0.2, 0.4], trials=400, seed=5)
    assert all(p["holds"] for p in at.points)
    assert not all(p["holds"] for p in below.points)


def test_rudelson_single_pair():
    m = 5
    e = np.zeros((m, 1))
    e[0, 0] = 1
    r = check_rudelson_inequality(e, e, trials=20)
    assert r.lhs == pytest.approx(1.0)
    assert r.ratio == pytest.approx(1 / (2 * math.sqrt(math.log(m))))


def test_rudelson_diagonal_signs():
    m = 8
    r = check_rudelson_inequality(np.eye(m), np.eye(m), trials=50, seed=1)
    assert r.lhs == pytest.approx(1.0, abs=1e-12)
    assert r.ratio == pytest.approx(1 / (2 * math.sqrt(math.log(m))), abs=1e-12)
    s = check_rudelson_inequality(np.eye(m), trials=50, symmetric=True)
    assert s.lhs == pytest.approx(1.0, abs=1e-12)
    assert s.ratio == pytest.approx(1 / math.sqrt(math.log(m)), abs=1e-12)


def test_rudelson_errors():
    with pytest.raises(InputError):
        check_rudelson_inequality(np.ones((3, 4)), np.ones((3, 5)))
    with pytest.raises(InputError):
        check_rudelson_inequality(np.ones((1, 4)), np.ones((1, 4)))


def test_counterexample_examples():
    r = counterexample_lower_bound(2, 2, np.zeros(4), 0)
    assert r["lhs"] == pytest.approx(1.0) and r["rhs"] == pytest.approx(1.0) and r["holds"]
    r = counterexample_lower_bound(2, 2, [1, 1, 0, 0], 2)
    assert r["zero_counts"] == [0, 2]
    assert r["lhs"] == pytest.approx(svd_norm(make_block(2, 2).matrix[:, [2, 3]]))
    assert r["rhs"] == pytest.approx(1.0)
    with pytest.raises(InputError):
        counterexample_lower_bound(2, 2, [1, 1, 1, 0], 2)


def test_counterexample_random_diagonals():
    for s in range(100):
        d = random_low_rank_diagonal(16, 4, RngHandle(11, s))
        assert np.count_nonzero(d) <= 4
        assert counterexample_lower_bound(2, 8, d, 4)["holds"]


def test_projection_closed_form_matches_direct():
    h, k = 3, 4
    u = make_modified_block(h, k)
    g = np.random.default_rng(0)
    for _ in range(30):
        counts = g.integers(0, k + 1, h)
        last = bool(g.integers(0, 2))
        alpha = g.uniform(0.2, 2.0)
        sigma = sigma_from_counts(h, k, counts, last)
        assert projection_error_direct(u, alpha, sigma) == pytest.approx(
            projection_error_closed_form(alpha, counts, k, last), abs=1e-12
        )


def test_projection_examples():
    h, k = 2, 3
    u = make_modified_block(h, k)
    assert projection_error_direct(u, 1.0, range(u.cols)) == pytest.approx(0.0, abs=1e-14)
    for alpha in (0.5, 1.0, 3.0):
        assert projection_error_direct(u, alpha, range(u.cols - 1)) >= 1 - 1e-12


def test_refuter_pigeonhole():
    out = alpha_projection_refuter(4, 64, 16, [1.0])
    r = out[0]
    assert r["certificate_min_over_sigma"] >= 1 - 4 / 64 - 1e-12
    assert r["min_error"] >= r["certificate_min_over_sigma"] - 1e-12
    u = make_modified_block(4, 64)
    assert projection_error_direct(u, 1.0, r["witness"]) == pytest.approx(r["min_error"], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.tuples(st.integers(1, 5), st.integers(1, 9), st.integers(0, 2**32 - 1)), st.floats(1, 20))
def test_sampler_partition_and_mean(t, n):
    m, N, seed = t
    g = np.random.default_rng(seed)
    a = g.standard_normal((m, N)) * (g.random(N) > 0.3)
    u = DenseOperator(a)
    s = make_sampler(u, n)
    sq = np.sum(a**2, axis=0)
    for j, case in enumerate(s.cases):
        load = s.K * sq[j] if sq[j] > 0 else 0.0
        if sq[j] == 0:
            assert case == ZERO
        elif abs(load - 1) <= 1e-12:
            assert case in (ONE, BERNOULLI)
        elif load > 1:
            assert case == ONE
        else:
            assert case == BERNOULLI
        if case == BERNOULLI:
            assert 0 < s.prob[j] <= 1
        if case != ZERO:
            assert s.prob[j] * s.value[j] == pytest.approx(1.0, rel=1e-12)
    assert s.expected_rank() <= 2 * n + 1e-9
    d = s.realize(RngHandle(seed))
    assert np.count_nonzero(d) <= np.count_nonzero(sq)
    assert approximation_error(u, np.ones(N)) == 0
