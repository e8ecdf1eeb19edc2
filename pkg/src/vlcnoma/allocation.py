"""Power-fraction vectors for the five downlink strategies.

All functions work in SIC rank order k = 1..K, rank 1 being the weakest
combined channel gain. Fractions are of the received total power and sum
to one; every formula is vectorized over optional leading batch axes.

Strategy names (exact strings used in configs and CSV output):

  fpa    geometric fractions with a fixed decay ratio mu:
             alpha_k = mu^(k-1) (1 - mu) / (1 - mu^K)
  sfpa   fpa with mu picked from the strongest user's channel so that, at
         high SNR, the strongest user's SINR equals the weak-user bound
         ((1 - mu)/mu)^beta. beta = 1 has the closed form
             mu = (1 + tx_snr * ||h_K||^2)^(-1/K)
         and beta > 1 is solved by bisection.
  grpa   fractions proportional to (||h_1|| / ||h_k||)^k
  ngdpa  power steps down from the strongest user by that user's normalized
         gain shortfall: the j-th step ratio is ((||h_K|| - h)/||h_K||)^j,
         so near-equal gains dump almost everything on the strongest user
  epa    each weak user pinned exactly at a minimum SINR target, with all
         leftover power granted to the strongest user
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "STRATEGY_NAMES",
    "ORDERING_GUARANTEE",
    "AllocationCoefficients",
    "StrategySpec",
    "InfeasibleAllocationError",
    "fpa_coefficients",
    "sfpa_mu",
    "sfpa_coefficients",
    "sfpa_mu_beta",
    "grpa_coefficients",
    "ngdpa_coefficients",
    "epa_coefficients",
    "epa_coefficients_masked",
    "strategy_alpha",
    "strategy_coefficients",
    "validate_coefficients",
]

STRATEGY_NAMES = ("fpa", "sfpa", "grpa", "ngdpa", "epa")

# Declared ordering guarantee per strategy:
#   non_increasing       alpha_1 >= ... >= alpha_K (classic NOMA ordering)
#   head_non_increasing  may break the ordering at the last rank only
#                        (epa hands the leftover budget to the strongest user)
#   none                 no ordering promise (ngdpa piles power on the strongest)
ORDERING_GUARANTEE = {
    "fpa": "non_increasing",
    "sfpa": "non_increasing",
    "grpa": "non_increasing",
    "ngdpa": "none",
    "epa": "head_non_increasing",
}

BISECTION_TOL = 1e-10
BISECTION_MAX_ITER = 200


class InfeasibleAllocationError(ValueError):
    """EPA cannot meet the SINR target for every weak user (sum would exceed 1)."""


@dataclass(frozen=True)
class AllocationCoefficients:
    """One trial's power fractions plus the declared ordering guarantee.

    ordering is one of the ORDERING_GUARANTEE classes; validation only
    enforces what the producing strategy actually promised.
    """

    alpha: np.ndarray
    ordering: str = "non_increasing"

    def __post_init__(self):
        if self.ordering not in ("non_increasing", "head_non_increasing", "none"):
            raise ValueError(f"unknown ordering class {self.ordering!r}")


@dataclass(frozen=True)
class StrategySpec:
    """Strategy selection plus tuning knobs; each strategy reads only its own.

    mu applies to fpa, beta to sfpa, sinr_target_db to epa. The dB value is
    converted to linear once, here at the boundary.
    """

    name: str
    mu: float = 0.2
    beta: float = 1.0
    sinr_target_db: float = 1.0

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise ValueError(
                f"unknown strategy {self.name!r}, expected one of {STRATEGY_NAMES}"
            )

    @property
    def sinr_target(self) -> float:
        """Linear SINR target for epa."""
        return 10.0 ** (self.sinr_target_db / 10.0)


def fpa_coefficients(mu, n_users: int) -> np.ndarray:
    """Geometric fractions alpha_k = mu^(k-1) (1 - mu) / (1 - mu^K).

    mu may be a scalar or an array (one value per trial); the result gains a
    trailing rank axis of length n_users. mu = 0 is the degenerate
    all-power-to-rank-1 vector (continuity limit); mu >= 1 is rejected.

    Evaluated as the normalized geometric weights mu^(k-1) / sum_i mu^(i-1),
    which is the same fraction with no 1 - mu^K cancellation, so the vector
    sums to one at machine precision even for mu arbitrarily close to 1.
    """
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0.0) or np.any(mu >= 1.0):
        raise ValueError("mu must lie in [0, 1)")
    if n_users == 1:
        return np.ones(mu.shape + (1,))
    k = np.arange(n_users)
    # 0^0 == 1 in numpy, so mu = 0 falls out as (1, 0, ..., 0) with no branch
    w = mu[..., None] ** k
    return w / np.sum(w, axis=-1, keepdims=True)


def sfpa_mu(tx_snr, strongest_gain_sq, n_users: int):
    """Fair decay ratio mu = (1 + tx_snr * ||h_K||^2)^(-1/K).

    Only the strongest user's combined gain enters; scalars broadcast
    against per-trial gain arrays. Result lies in (0, 1).
    """
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    snr = np.asarray(tx_snr, dtype=float)
    gain = np.asarray(strongest_gain_sq, dtype=float)
    if np.any(snr <= 0.0):
        raise ValueError("transmission SNR must be positive")
    if np.any(gain <= 0.0):
        raise ValueError("strongest combined gain must be positive")
    out = (1.0 + snr * gain) ** (-1.0 / n_users)
    return out if out.ndim else float(out)


def sfpa_coefficients(tx_snr, strongest_gain_sq, n_users: int) -> np.ndarray:
    """Closed-form fair allocation: mu from sfpa_mu fed through fpa_coefficients."""
    return fpa_coefficients(sfpa_mu(tx_snr, strongest_gain_sq, n_users), n_users)


def _fpa_last(mu, n_users: int):
    """alpha_K under fpa, written to broadcast over mu arrays."""
    if n_users == 1:
        return np.ones_like(mu)
    w = mu[..., None] ** np.arange(n_users)
    return w[..., -1] / np.sum(w, axis=-1)


def sfpa_mu_beta(beta: float, tx_snr, strongest_gain_sq, n_users: int,
                 tol: float = BISECTION_TOL):
    """Solve alpha_K(mu) * tx_snr * ||h_K||^2 = ((1 - mu)/mu)^beta for mu.

    The left side rises with mu and the right side falls, so the root in
    (0, 1) is unique; plain bisection brackets it. Each element freezes at
    the first midpoint whose residual is within tol relative to the target
    side, which keeps the result independent of how trials are batched.
    beta = 1 agrees with sfpa_mu up to the tolerance.
    """
    if beta < 1.0:
        raise ValueError("beta must be >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    g_in = np.asarray(tx_snr, dtype=float) * np.asarray(strongest_gain_sq, dtype=float)
    if np.any(g_in <= 0.0):
        raise ValueError("tx_snr * strongest gain must be positive")
    g = np.atleast_1d(g_in).ravel()

    def residual(mu):
        target = ((1.0 - mu) / mu) ** beta
        return _fpa_last(mu, n_users) * g - target, target

    eps = 1e-12
    lo = np.full_like(g, eps)
    hi = np.full_like(g, 1.0 - eps)
    f_lo, _ = residual(lo)
    f_hi, _ = residual(hi)
    if np.any(f_lo > 0.0) or np.any(f_hi < 0.0):
        raise ValueError(
            "no sign change on (0, 1): tx_snr * gain too small for a fair split"
        )

    out = np.empty_like(g)
    done = np.zeros(g.shape, dtype=bool)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f, target = residual(mid)
        newly = ~done & np.isfinite(f) & (np.abs(f) <= tol * target)
        out[newly] = mid[newly]
        done |= newly
        if done.all():
            break
        go_up = ~done & (f < 0.0)
        lo = np.where(go_up, mid, lo)
        hi = np.where(~done & ~go_up, mid, hi)
    if not done.all():
        raise ArithmeticError("bisection did not reach the requested tolerance")
    if g_in.ndim == 0:
        return float(out[0])
    return out.reshape(g_in.shape)


def grpa_coefficients(gains_sq_sorted) -> np.ndarray:
    """Gain-ratio fractions: weight_k = (||h_1||/||h_k||)^k, normalized.

    gains_sq_sorted holds combined squared gains per SIC rank, ascending
    along the last axis; all entries must be positive.
    """
    g = np.asarray(gains_sq_sorted, dtype=float)
    _check_sorted_positive(g, allow_zero=False)
    norms = np.sqrt(g)
    k = np.arange(1, g.shape[-1] + 1)
    w = (norms[..., :1] / norms) ** k
    return w / np.sum(w, axis=-1, keepdims=True)


def ngdpa_coefficients(gains_sq_sorted) -> np.ndarray:
    """Normalized-gain-difference fractions, greedy toward the strongest user.

    Walking down from the top rank, the j-th step (j = 1 for the step onto
    the second-strongest user) scales power by that user's normalized gain
    shortfall raised to j:

        alpha_{K-j} / alpha_{K-j+1} = ((||h_K|| - ||h_{K-j}||) / ||h_K||)^j

    A user nearly as strong as the best one is nearly indistinguishable at
    the receiver and its fraction collapses, so equal-gain ties put all
    power on the strongest user. This is what buys ngdpa its sum rate and
    costs it fairness. Only the strongest gain has to be positive.
    """
    g = np.asarray(gains_sq_sorted, dtype=float)
    _check_sorted_positive(g, allow_zero=True)
    n_users = g.shape[-1]
    if np.any(g[..., -1] <= 0.0):
        raise ValueError("strongest combined gain must be positive")
    if n_users == 1:
        return np.ones_like(g)
    norms = np.sqrt(g)
    strongest = norms[..., -1:]
    # step ratio attached to rank k (1..K-1), exponent K-k grows toward rank 1
    exponents = np.arange(n_users - 1, 0, -1)
    steps = ((strongest - norms[..., :-1]) / strongest) ** exponents
    # w_k = prod of steps k..K-1, w_K = 1: reversed cumulative product
    w_head = np.cumprod(steps[..., ::-1], axis=-1)[..., ::-1]
    w = np.concatenate([w_head, np.ones(g.shape[:-1] + (1,))], axis=-1)
    return w / np.sum(w, axis=-1, keepdims=True)


def epa_coefficients_masked(gains_sq_sorted, noise_power: float, led_power: float,
                            sinr_target: float):
    """EPA fractions plus a per-trial feasibility mask (no exception raised).

    Rank k < K is pinned at the exact-SINR target:
        alpha_k = t ((1 - S_{k-1}) + sigma^2 / (P^2 ||h_k||^2)) / (1 + t)
    and rank K receives 1 - S_{K-1}. A trial is infeasible when the weak-user
    targets eat the whole budget (S_{K-1} >= 1 or any negative fraction).
    """
    if sinr_target <= 0.0:
        raise ValueError("sinr_target must be positive (linear)")
    if noise_power <= 0.0 or led_power <= 0.0:
        raise ValueError("noise_power and led_power must be positive")
    g = np.asarray(gains_sq_sorted, dtype=float)
    _check_sorted_positive(g, allow_zero=False)
    n_users = g.shape[-1]
    t = float(sinr_target)
    noise_frac = noise_power / (led_power * led_power * g)
    alpha = np.empty_like(g)
    spent = np.zeros(g.shape[:-1])
    for k in range(n_users - 1):
        a = t * ((1.0 - spent) + noise_frac[..., k]) / (1.0 + t)
        alpha[..., k] = a
        spent = spent + a
    alpha[..., -1] = 1.0 - spent
    feasible = (spent < 1.0) & np.all(alpha[..., :-1] >= 0.0, axis=-1)
    return alpha, feasible


def epa_coefficients(gains_sq_sorted, noise_power: float, led_power: float,
                     sinr_target: float) -> np.ndarray:
    """EPA fractions; raises InfeasibleAllocationError when the target cannot be met."""
    alpha, feasible = epa_coefficients_masked(
        gains_sq_sorted, noise_power, led_power, sinr_target
    )
    if not np.all(feasible):
        raise InfeasibleAllocationError(
            "SINR target infeasible: weak-user fractions already exceed the power budget"
        )
    return alpha


def strategy_alpha(spec: StrategySpec, gains_sq_sorted, noise_power: float,
                   led_power: float):
    """Dispatch one strategy over (batched) sorted gains.

    Returns (alpha, feasible): alpha has the shape of gains_sq_sorted and
    feasible is a boolean mask over the leading axes (all True except for
    infeasible epa trials).
    """
    g = np.asarray(gains_sq_sorted, dtype=float)
    n_users = g.shape[-1]
    lead = g.shape[:-1]
    feasible = np.ones(lead, dtype=bool)
    if spec.name == "fpa":
        alpha = np.broadcast_to(fpa_coefficients(spec.mu, n_users), g.shape).copy()
    elif spec.name == "sfpa":
        tx_snr = led_power * led_power / noise_power
        if spec.beta == 1.0:
            mu = sfpa_mu(tx_snr, g[..., -1], n_users)
        else:
            mu = sfpa_mu_beta(spec.beta, tx_snr, g[..., -1], n_users)
        alpha = fpa_coefficients(mu, n_users)
    elif spec.name == "grpa":
        alpha = grpa_coefficients(g)
    elif spec.name == "ngdpa":
        alpha = ngdpa_coefficients(g)
    elif spec.name == "epa":
        alpha, feasible = epa_coefficients_masked(
            g, noise_power, led_power, spec.sinr_target
        )
    else:  # unreachable: StrategySpec validates the name
        raise ValueError(f"unknown strategy {spec.name!r}")
    return alpha, feasible


def strategy_coefficients(spec: StrategySpec, gains_sq_sorted, noise_power: float,
                          led_power: float) -> AllocationCoefficients:
    """Single-trial dispatch returning the declared-ordering wrapper."""
    alpha, feasible = strategy_alpha(spec, gains_sq_sorted, noise_power, led_power)
    if not np.all(feasible):
        raise InfeasibleAllocationError(
            f"{spec.name}: SINR target infeasible for this trial"
        )
    return AllocationCoefficients(alpha=alpha, ordering=ORDERING_GUARANTEE[spec.name])


def validate_coefficients(coeffs: AllocationCoefficients, sum_tol: float = 1e-9):
    """Invariant report for one allocation vector; an empty list means valid.

    Checks sum-to-one within sum_tol, the [0, 1] range of every fraction,
    and the ordering the producing strategy declared ("head_non_increasing"
    tolerates a break at the last rank only; "none" skips the check).
    """
    problems = []
    a = np.asarray(coeffs.alpha, dtype=float)
    if a.ndim != 1 or a.size < 1:
        return [f"alpha must be a non-empty 1-D vector, got shape {a.shape}"]
    if not np.all(np.isfinite(a)):
        problems.append("alpha contains non-finite entries")
        return problems
    total = float(np.sum(a))
    if abs(total - 1.0) > sum_tol:
        problems.append(f"sum violation: fractions total {total!r}, expected 1")
    if np.any(a < -1e-12) or np.any(a > 1.0 + 1e-12):
        problems.append("range violation: fractions must lie in [0, 1]")
    if coeffs.ordering == "non_increasing":
        head, scope = a, "all ranks"
    elif coeffs.ordering == "head_non_increasing":
        head, scope = a[:-1], "ranks below the strongest user"
    else:
        head, scope = a[:0], ""
    if head.size > 1 and np.any(np.diff(head) > 1e-12):
        problems.append(f"ordering violation: fractions must be non-increasing over {scope}")
    return problems


def _check_sorted_positive(g: np.ndarray, allow_zero: bool):
    if g.ndim < 1 or g.shape[-1] < 1:
        raise ValueError("need at least one gain per trial")
    if allow_zero:
        if np.any(g < 0.0):
            raise ValueError("combined gains must be non-negative")
    elif np.any(g <= 0.0):
        raise ValueError("combined gains must be positive")
    if np.any(np.diff(g, axis=-1) < 0.0):
        raise ValueError("gains must be sorted ascending along the last axis")
