"""Per-user SINR under perfect SIC and the electrical-domain rate bound.

With fractions alpha over SIC ranks and combined gains ||h_k||^2, the exact
SINR at rank k is

    SINR_k = alpha_k P^2 ||h_k||^2 / (I_k P^2 ||h_k||^2 + sigma^2)

where I_k = sum_{i>k} alpha_i is the power left for later-decoded users;
I_K = 0, so the strongest user sees pure noise. Rates use the intensity
channel capacity lower bound

    R = (B / 2) * log2(1 + (e / 2 pi) * SINR)   [bits/s]

the e/(2 pi) factor and the 1/2 pre-log are part of the bound, not tuning
knobs. The high-SNR SINR forms exist for analysis and tests; the simulation
path always evaluates the exact expression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .allocation import AllocationCoefficients

__all__ = [
    "RATE_BOUND_COEFF",
    "LinkBudget",
    "residual_power_fraction",
    "sinr_vector",
    "sinr_exact",
    "sinr_high_snr",
    "achievable_rate",
    "user_rates",
]

# electrical SNR scaling of the intensity-channel capacity lower bound
RATE_BOUND_COEFF = math.e / (2.0 * math.pi)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, noise, bandwidth, and per-rank combined gains."""

    led_power: float      # W
    noise_power: float    # A^2, common to all users
    bandwidth: float      # Hz
    gains_sq: np.ndarray  # ||h_k||^2 per SIC rank, ascending

    def __post_init__(self):
        if self.led_power <= 0.0:
            raise ValueError("led_power must be positive")
        if self.noise_power <= 0.0:
            raise ValueError("noise_power must be positive")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")

    @property
    def tx_snr(self) -> float:
        """Transmission SNR P^2 / sigma^2, before channel attenuation."""
        return self.led_power * self.led_power / self.noise_power


def _alpha_array(alpha) -> np.ndarray:
    if isinstance(alpha, AllocationCoefficients):
        return np.asarray(alpha.alpha, dtype=float)
    return np.asarray(alpha, dtype=float)


def residual_power_fraction(alpha) -> np.ndarray:
    """sum_{i>k} alpha_i per rank: the not-yet-decoded interference share.

    Computed as a direct tail sum, so the last rank is exactly zero rather
    than a 1 - cumsum rounding residue.
    """
    a = _alpha_array(alpha)
    tail = np.zeros_like(a)
    if a.shape[-1] > 1:
        tail[..., :-1] = np.cumsum(a[..., :0:-1], axis=-1)[..., ::-1]
    return tail


def sinr_vector(alpha, gains_sq, led_power: float, noise_power: float) -> np.ndarray:
    """Exact SINR at every SIC rank; broadcasts over leading batch axes."""
    a = _alpha_array(alpha)
    g = np.asarray(gains_sq, dtype=float)
    p_sq = led_power * led_power
    signal = a * p_sq * g
    interference = residual_power_fraction(a) * p_sq * g
    return signal / (interference + noise_power)


def sinr_exact(alpha, rank: int, budget: LinkBudget) -> float:
    """Exact SINR at one 1-based SIC rank (rank 1 = weakest, decoded first)."""
    a = _alpha_array(alpha)
    n_users = a.shape[-1]
    if not 1 <= rank <= n_users:
        raise ValueError(f"rank must be in 1..{n_users}, got {rank}")
    full = sinr_vector(a, budget.gains_sq, budget.led_power, budget.noise_power)
    return float(full[..., rank - 1])


def sinr_high_snr(alpha, rank: int, strongest_rx_snr: float) -> float:
    """High-SNR SINR: alpha_k / sum_{i>k} alpha_i below the top rank.

    At rank K interference vanishes and the value is alpha_K times
    strongest_rx_snr (= tx_snr * ||h_K||^2); the argument is ignored for
    k < K. A fully spent budget below rank K returns +inf as a sentinel.
    """
    a = _alpha_array(alpha)
    n_users = a.shape[-1]
    if not 1 <= rank <= n_users:
        raise ValueError(f"rank must be in 1..{n_users}, got {rank}")
    if rank == n_users:
        return float(a[..., -1] * strongest_rx_snr)
    tail = float(np.sum(a[..., rank:], axis=-1))
    if tail == 0.0:
        return math.inf
    return float(a[..., rank - 1] / tail)


def achievable_rate(sinr, bandwidth: float):
    """Capacity lower bound R = (B/2) log2(1 + (e/2pi) SINR) in bits/s."""
    if bandwidth <= 0.0:
        raise ValueError("bandwidth must be positive")
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0.0):
        raise ValueError("SINR must be non-negative")
    out = 0.5 * bandwidth * np.log2(1.0 + RATE_BOUND_COEFF * sinr)
    return out if out.ndim else float(out)


def user_rates(alpha, budget: LinkBudget) -> np.ndarray:
    """Achievable rate per SIC rank from the exact SINR expression."""
    sinr = sinr_vector(alpha, budget.gains_sq, budget.led_power, budget.noise_power)
    return achievable_rate(sinr, budget.bandwidth)
