import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from shellhyper.errors import DomainError
from shellhyper.filters import (
    FILTERS,
    Filter,
    FilterPair,
    exp_filter,
    get_filter,
    indicator_filter,
    product_filter,
)

# exp(-2 exp(-4) / 0.5), evaluated with mpmath at 30 digits
EXP_FILTER_AT_1_5 = 0.92935679020240320


class TestExpFilter:
    def test_examples(self):
        assert exp_filter(0.5) == 1.0
        assert exp_filter(2.5) == 0.0
        assert_allclose(exp_filter(1.5), EXP_FILTER_AT_1_5, rtol=1e-15)

    def test_against_mpmath(self):
        mpmath.mp.dps = 30
        for x in np.linspace(1.01, 1.99, 25):
            xm = mpmath.mpf(x)
            ref = mpmath.exp(-2 * mpmath.exp(2 / (1 - xm)) / (2 - xm))
            assert_allclose(exp_filter(x), float(ref), rtol=1e-13, atol=1e-300)

    def test_plateau_and_support_bit_exact(self):
        x = np.concatenate([np.linspace(0, 1, 101), [1.0 + 1e-12]])
        assert np.all(exp_filter(x) == 1.0)
        assert np.all(exp_filter(np.linspace(2, 10, 101)) == 0.0)
        assert exp_filter(2.0 - 1e-12) == 0.0

    def test_no_warnings_near_joins(self):
        with np.errstate(all="raise"):
            exp_filter(np.array([1 + 1e-15, 1 + 1e-8, 2 - 1e-8, 2 - 1e-15]))

    def test_range_and_monotone(self):
        v = exp_filter(np.linspace(1, 2, 1000))
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(np.diff(v) <= 0)

    @pytest.mark.parametrize("delta", [1e-2, 1e-4, 1e-6])
    def test_continuity_at_joins(self, delta):
        assert abs(exp_filter(1 + delta) - 1.0) < 10 * delta
        assert abs(exp_filter(1 - delta) - 1.0) == 0.0
        assert exp_filter(2 - delta) < 10 * delta

    @pytest.mark.parametrize("join", [1.0, 2.0])
    def test_smooth_join_differences(self, join):
        h = 1e-4
        x = join + h * np.arange(-2, 3)
        v = exp_filter(x)
        d1 = np.diff(v) / h
        d2 = np.diff(v, 2) / h**2
        assert np.max(np.abs(np.diff(d1))) < 1e-3
        assert np.max(np.abs(np.diff(d2))) < 1e-3

    def test_scalar_and_array(self):
        assert isinstance(exp_filter(1.5), float)
        assert exp_filter(np.array([0.0, 3.0])).shape == (2,)

    def test_negative(self):
        with pytest.raises(DomainError):
            exp_filter(-0.1)
        with pytest.raises(DomainError):
            exp_filter(np.array([0.5, np.nan]))


class TestIndicator:
    def test_examples(self):
        assert indicator_filter(1.0) == 1.0
        assert indicator_filter(1.0001) == 0.0
        assert indicator_filter(0.0) == 1.0

    def test_negative(self):
        with pytest.raises(DomainError):
            indicator_filter(-1.0)


class TestFilterPair:
    def test_product_examples(self):
        pair = FilterPair.by_name("exp")
        assert product_filter(pair, 0.2, 0.9) == 1.0
        assert_allclose(product_filter(pair, 1.5, 0.5), EXP_FILTER_AT_1_5, rtol=1e-15)
        assert product_filter(pair, 0.5, 3.0) == 0.0
        assert pair(1.5, 0.5) == product_filter(pair, 1.5, 0.5)

    def test_caps(self):
        pair = FilterPair.by_name("exp", "indicator")
        assert (pair.a, pair.b) == (2.0, 1.0)
        assert pair.h_ang(1.5) == 0.0 and pair.h_rad(1.5) > 0.9

    @pytest.mark.parametrize("name", sorted(FILTERS))
    def test_vanishes_beyond_cap(self, name):
        f = get_filter(name)
        assert np.all(f(np.linspace(f.cap + 1e-9, f.cap + 5, 50)) == 0.0)
        assert np.all(f(np.linspace(0, 1, 50)) == 1.0)

    def test_rejects_bad_cap(self):
        with pytest.raises(DomainError):
            FilterPair(Filter("wide", exp_filter, 3.0), get_filter("exp"))

    def test_unknown_name(self):
        with pytest.raises(DomainError, match="unknown filter"):
            get_filter("cosine")
