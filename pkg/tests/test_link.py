import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlcnoma.allocation import fpa_coefficients, sfpa_coefficients, sfpa_mu
from vlcnoma.link import (
    LinkBudget,
    RATE_BOUND_COEFF,
    achievable_rate,
    residual_power_fraction,
    sinr_exact,
    sinr_high_snr,
    sinr_vector,
    user_rates,
)


def budget(gains, led_power=10.0, noise_power=2e-14, bandwidth=20e6):
    return LinkBudget(led_power=led_power, noise_power=noise_power,
                      bandwidth=bandwidth, gains_sq=np.asarray(gains, dtype=float))


class TestResidualPowerFraction:
    def test_tail_sums(self):
        tail = residual_power_fraction(np.array([0.5, 0.3, 0.2]))
        np.testing.assert_allclose(tail, [0.5, 0.2, 0.0], rtol=1e-15)

    def test_last_rank_exactly_zero(self):
        # a cumsum-based 1 - sum would leave rounding residue here
        alpha = np.array([0.1] * 7 + [0.3])
        assert residual_power_fraction(alpha)[-1] == 0.0


class TestSinrExact:
    def test_high_snr_limit_two_users(self):
        b = budget([1.0, 1.0], led_power=1.0, noise_power=1e-12)
        assert sinr_exact(np.array([0.8, 0.2]), 1, b) == pytest.approx(4.0, rel=1e-9)

    def test_zero_fraction_gives_zero(self):
        b = budget([1.0, 2.0])
        assert sinr_exact(np.array([1.0, 0.0]), 2, b) == 0.0

    def test_single_user_is_rx_snr(self):
        b = budget([3e-10])
        expected = b.tx_snr * 3e-10
        assert sinr_exact(np.array([1.0]), 1, b) == pytest.approx(expected, rel=1e-12)

    def test_top_rank_sees_pure_noise(self):
        alpha = np.array([0.1] * 7 + [0.3])
        g = np.linspace(1e-10, 8e-10, 8)
        b = budget(g)
        expected = 0.3 * b.led_power ** 2 * g[-1] / b.noise_power
        assert sinr_exact(alpha, 8, b) == expected

    def test_rank_bounds(self):
        b = budget([1.0, 2.0])
        for bad in (0, 3):
            with pytest.raises(ValueError):
                sinr_exact(np.array([0.8, 0.2]), bad, b)


class TestSinrHighSnr:
    def test_fpa_mu_half_k3_rank1(self):
        alpha = fpa_coefficients(0.5, 3)
        assert sinr_high_snr(alpha, 1, 0.0) == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_fpa_second_to_last_rank(self):
        # exponent 1 in the closed form: (1 - mu)/(mu (1 - mu)) = 1/mu
        alpha = fpa_coefficients(0.2, 4)
        assert sinr_high_snr(alpha, 3, 0.0) == pytest.approx(5.0, rel=1e-12)

    def test_weakest_user_approaches_fairness_bound_at_large_k(self):
        # rank 1 tends to (1 - mu)/mu as K grows; that limit is the bound
        # the strongest user is pinned to under the fair allocation
        alpha = fpa_coefficients(0.2, 64)
        assert sinr_high_snr(alpha, 1, 0.0) == pytest.approx(4.0, rel=1e-9)

    def test_top_rank_passthrough(self):
        alpha = np.array([0.9, 0.1])
        assert sinr_high_snr(alpha, 2, 70.0) == pytest.approx(7.0, rel=1e-12)

    def test_spent_budget_sentinel(self):
        assert sinr_high_snr(np.array([1.0, 0.0, 0.0]), 1, 0.0) == math.inf

    @given(st.floats(min_value=1e-3, max_value=0.99),
           st.integers(min_value=2, max_value=16))
    def test_matches_fpa_closed_form(self, mu, n_users):
        # (1 - mu) / (mu (1 - mu^(K-k))) for every rank below the top
        alpha = fpa_coefficients(mu, n_users)
        for rank in range(1, n_users):
            closed = (1.0 - mu) / (mu * (1.0 - mu ** (n_users - rank)))
            assert sinr_high_snr(alpha, rank, 0.0) == pytest.approx(closed, rel=1e-12)


class TestAchievableRate:
    def test_zero_sinr_zero_rate(self):
        assert achievable_rate(0.0, 20e6) == 0.0

    def test_frozen_value_matching_min_rate_figure(self):
        # B = 20 MHz, SINR = 5: the fpa mu=0.2 weak-user operating point
        assert achievable_rate(5.0, 20e6) == pytest.approx(16613573.87235888, rel=1e-12)

    def test_frozen_value_high_sinr(self):
        assert achievable_rate(1e3, 20e6) == pytest.approx(87603140.7220773, rel=1e-12)

    def test_coefficient_value(self):
        assert RATE_BOUND_COEFF == pytest.approx(0.43262798971613253, rel=1e-15)

    @given(st.floats(min_value=0.0, max_value=1e9),
           st.floats(min_value=1.0, max_value=1e9))
    def test_strictly_increasing_in_sinr(self, sinr, bump):
        assert achievable_rate(sinr + bump, 20e6) > achievable_rate(sinr, 20e6)

    def test_negative_sinr_rejected(self):
        with pytest.raises(ValueError):
            achievable_rate(-0.1, 20e6)


class TestUserRates:
    def test_single_user_composition(self):
        b = budget([2e-10])
        rate = user_rates(np.array([1.0]), b)[0]
        sinr = b.tx_snr * 2e-10
        assert rate == pytest.approx(
            0.5 * b.bandwidth * math.log2(1.0 + RATE_BOUND_COEFF * sinr), rel=1e-12)

    def test_zero_fraction_zero_rate(self):
        b = budget([1e-10, 2e-10])
        rates = user_rates(np.array([1.0, 0.0]), b)
        assert rates[1] == 0.0

    def test_converges_to_high_snr_form(self):
        # noise shrunk until interference dominates it by more than 1e6
        alpha = fpa_coefficients(0.3, 4)
        g = np.array([1.0, 2.0, 3.0, 4.0])
        b = budget(g, led_power=1.0, noise_power=1e-9)
        assert (residual_power_fraction(alpha)[:-1] * g[:-1] / b.noise_power).min() > 1e6
        exact = user_rates(alpha, b)
        approx_sinr = np.array(
            [sinr_high_snr(alpha, k, b.tx_snr * g[-1]) for k in range(1, 5)])
        approx = achievable_rate(approx_sinr, b.bandwidth)
        np.testing.assert_allclose(exact, approx, rtol=1e-3)

    def test_accepts_allocation_wrapper(self):
        from vlcnoma.allocation import AllocationCoefficients
        b = budget([1e-10, 2e-10])
        wrapped = AllocationCoefficients(np.array([0.8, 0.2]), "non_increasing")
        np.testing.assert_array_equal(
            user_rates(wrapped, b), user_rates(np.array([0.8, 0.2]), b))


class TestHighSnrConvergence:
    @given(st.floats(min_value=0.05, max_value=0.8),
           st.integers(min_value=2, max_value=8))
    def test_exact_approaches_high_snr(self, mu, n_users):
        alpha = fpa_coefficients(mu, n_users)
        g = np.linspace(1.0, 2.0, n_users)
        noise = 1e-9  # interference-to-noise far beyond 1e6 for every rank
        for rank in range(1, n_users):
            interference = float(np.sum(alpha[rank:]) * g[rank - 1])
            if interference / noise <= 1e6:
                continue
            exact = sinr_vector(alpha, g, 1.0, noise)[rank - 1]
            approx = sinr_high_snr(alpha, rank, 0.0)
            assert abs(exact - approx) / approx < 1e-3


class TestSfpaEndToEnd:
    def test_top_rank_sinr_equals_fairness_bound(self):
        # exact pipeline: rank K sees no interference, so its SINR is
        # alpha_K tx_snr ||h_K||^2 = (1 - mu)/mu by the closed-form identity
        g = np.array([0.7e-10, 1.9e-10])
        b = budget(g)
        mu = sfpa_mu(b.tx_snr, g[-1], 2)
        alpha = sfpa_coefficients(b.tx_snr, g[-1], 2)
        sinr_top = sinr_exact(alpha, 2, b)
        assert sinr_top == pytest.approx((1.0 - mu) / mu, rel=1e-9)

    def test_top_rank_rate_follows(self):
        g = np.array([0.7e-10, 1.9e-10])
        b = budget(g)
        mu = sfpa_mu(b.tx_snr, g[-1], 2)
        rates = user_rates(sfpa_coefficients(b.tx_snr, g[-1], 2), b)
        expected = 0.5 * b.bandwidth * math.log2(
            1.0 + RATE_BOUND_COEFF * (1.0 - mu) / mu)
        assert rates[-1] == pytest.approx(expected, rel=1e-9)


class TestLinkBudget:
    def test_tx_snr(self):
        assert budget([1e-10]).tx_snr == pytest.approx(5e15, rel=1e-12)

    @pytest.mark.parametrize("kwargs", [
        dict(led_power=0.0), dict(noise_power=0.0), dict(bandwidth=-1.0)])
    def test_invariants(self, kwargs):
        with pytest.raises(ValueError):
            budget([1e-10], **{**dict(led_power=10.0, noise_power=2e-14,
                                      bandwidth=20e6), **kwargs})
