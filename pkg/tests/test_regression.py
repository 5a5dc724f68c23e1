"""Seed-pinned Monte Carlo values; a change here means the sampling stream moved."""

import pytest

from restrictlab.approximation import check_rudelson_inequality, estimate_mean_error
from restrictlab.constants import rudelson_instance
from restrictlab.operators import make_block, make_untf
from restrictlab.suppression import estimate_expected_restriction_norm

pytestmark = pytest.mark.slow


def test_block_16_at_h_log2_h():
    r = estimate_expected_restriction_norm(make_block(16, 16), 64, "selectors", 2000, 0)
    assert r.summary.mean == pytest.approx(0.6674334618737952, rel=1e-12)
    assert r.summary.mean / r.M == pytest.approx(2.6697338474951806, rel=1e-12)


def test_untf_mean_error():
    r = estimate_mean_error(make_untf(16, 64), 48, 2000, 0)
    assert r.error.mean == pytest.approx(0.5682601716217832, rel=1e-12)
    assert r.ratio == pytest.approx(0.5002475660559421, rel=1e-12)


def test_block_mean_error_ratio():
    assert estimate_mean_error(make_block(8, 8), 32, 2000, 0).ratio == pytest.approx(0.6531844576198534, rel=1e-12)


def test_rudelson_instance_ratio():
    x, y = rudelson_instance(16, 50, 0, 0)
    assert check_rudelson_inequality(x, y, 2000, 0).ratio == pytest.approx(0.40755468100762937, rel=1e-12)
