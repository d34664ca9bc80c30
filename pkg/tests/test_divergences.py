import math

import numpy as np
import pytest

from dpbai.divergences import glr_statistic, kl_bernoulli, transport_cost, tv_bernoulli
from dpbai.errors import DomainError, ZeroCount


class TestKlBernoulli:
    def test_identity(self):
        assert kl_bernoulli(0.3, 0.3) == 0.0
        assert kl_bernoulli(0.0, 0.0) == 0.0
        assert kl_bernoulli(1.0, 1.0) == 0.0

    def test_half_quarter(self):
        # 0.5*log(2) + 0.5*log(2/3), evaluated at 50-digit precision
        assert kl_bernoulli(0.5, 0.25) == pytest.approx(0.14384103622589045, abs=1e-14)

    def test_delta_correctness_bound(self):
        # kl(1 - d, d) >= log(1/(3 d)) for d = 0.01
        assert kl_bernoulli(0.99, 0.01) >= math.log(1.0 / 0.03)

    def test_infinite_on_degenerate_target(self):
        assert kl_bernoulli(0.5, 0.0) == math.inf
        assert kl_bernoulli(0.5, 1.0) == math.inf
        assert kl_bernoulli(0.0, 1.0) == math.inf

    def test_infinity_compares(self):
        assert kl_bernoulli(0.5, 0.0) > kl_bernoulli(0.5, 1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            kl_bernoulli(1.2, 0.5)
        with pytest.raises(DomainError):
            kl_bernoulli(0.5, -0.1)

    def test_strictly_convex_in_q(self):
        h = 1e-4
        for p in np.linspace(0.1, 0.9, 9):
            for q in np.linspace(0.1, 0.9, 9):
                second = (
                    kl_bernoulli(p, q + h) - 2 * kl_bernoulli(p, q) + kl_bernoulli(p, q - h)
                ) / h**2
                assert second > 0


class TestTvBernoulli:
    def test_values(self):
        assert tv_bernoulli(0.95, 0.9) == pytest.approx(0.05)
        assert tv_bernoulli(0.4, 0.4) == 0.0
        assert tv_bernoulli(0.0, 1.0) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            tv_bernoulli(1.5, 0.5)

    def test_pinsker_grid(self):
        for p in np.linspace(0.05, 0.95, 19):
            for q in np.linspace(0.05, 0.95, 19):
                assert tv_bernoulli(p, q) ** 2 <= kl_bernoulli(p, q) / 2.0 + 1e-15


class TestGlrStatistic:
    def test_zero_on_equal_means(self):
        assert glr_statistic(0.4, 0.4, 10, 3) == 0.0

    def test_value(self):
        assert glr_statistic(0.9, 0.5, 8, 8) == pytest.approx(0.64)

    def test_symmetry(self):
        assert glr_statistic(0.7, 0.2, 5, 9) == pytest.approx(glr_statistic(0.2, 0.7, 9, 5))

    def test_zero_count(self):
        with pytest.raises(ZeroCount):
            glr_statistic(0.5, 0.4, 0, 5)


class TestTransportCost:
    def test_zero_on_equal_means(self):
        assert transport_cost(0.4, 0.4, 3, 9) == 0.0

    def test_value(self):
        assert transport_cost(0.9, 0.5, 4, 4) == pytest.approx(0.4 / math.sqrt(0.5))

    def test_monotone_in_challenger_count(self):
        assert transport_cost(0.9, 0.5, 10, 20) > transport_cost(0.9, 0.5, 10, 5)

    def test_negative_when_challenger_ahead(self):
        assert transport_cost(0.3, 0.6, 10, 10) < 0

    def test_zero_count(self):
        with pytest.raises(ZeroCount):
            transport_cost(0.5, 0.4, 5, 0)

    def test_square_matches_glr_when_ordered(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            b, a = sorted(rng.uniform(0, 1, size=2))
            n, m = rng.integers(1, 50, size=2)
            assert transport_cost(a, b, int(n), int(m)) ** 2 == pytest.approx(
                glr_statistic(a, b, int(n), int(m))
            )
