"""Monte Carlo engine: random placements, shared-channel strategy comparison.

For every user count K the engine draws N i.i.d. uniform placements on the
receiver plane, computes the channel once per placement, and feeds the same
sorted gains to every configured strategy (paired comparison). Trials are
processed in fixed-size batches; the random stream of a batch is derived
from Philox keyed by (seed, K index, batch index), and batch results are
reduced in batch order. Thread count therefore changes scheduling only,
never a single output bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import channel as ch
from . import link
from .allocation import (InfeasibleAllocationError, StrategySpec,
                         strategy_alpha, strategy_coefficients)
from .metrics import RankAccumulator

__all__ = [
    "BATCH_TRIALS",
    "ScenarioConfig",
    "TrialResult",
    "SweepRow",
    "SweepResult",
    "default_scenario",
    "place_users",
    "run_trial",
    "run_sweep",
]

# Fixed batch grid: reductions always happen on the same trial partitions,
# so results cannot depend on how many workers execute them.
BATCH_TRIALS = 2048

RNG_DESCRIPTION = (
    "philox: per-batch substreams SeedSequence(seed, spawn_key=(k_index, batch_index)), "
    f"batch={BATCH_TRIALS} trials"
)


@dataclass(frozen=True)
class ScenarioConfig:
    """Room, devices, link budget, and sweep settings (SI units, radians)."""

    room_x: float
    room_y: float
    led_xy: tuple
    vertical_separation: float
    device: ch.DeviceParams
    noise_psd: float      # A^2/Hz
    bandwidth: float      # Hz
    user_counts: tuple
    trials: int
    seed: int
    strategies: tuple

    def __post_init__(self):
        if self.room_x <= 0.0 or self.room_y <= 0.0:
            raise ValueError("room dimensions must be positive")
        if len(self.led_xy) < 1:
            raise ValueError("need at least one LED")
        if self.vertical_separation <= 0.0:
            raise ValueError("vertical_separation must be positive")
        if self.noise_psd <= 0.0:
            raise ValueError("noise_psd must be positive")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        if len(self.user_counts) < 1 or any(k < 1 for k in self.user_counts):
            raise ValueError("user_counts must be a non-empty list of K >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.strategies) < 1:
            raise ValueError("need at least one strategy")
        names = [s.name for s in self.strategies]
        if len(set(names)) != len(names):
            raise ValueError("strategy names must be unique")

    @property
    def noise_power(self) -> float:
        """sigma^2 = noise PSD * bandwidth (A^2)."""
        return self.noise_psd * self.bandwidth

    @property
    def tx_snr(self) -> float:
        return self.device.led_optical_power ** 2 / self.noise_power

    @property
    def led_positions(self) -> list:
        """LEDs in 3-D: receiver plane sits at z = 0 by convention."""
        return [ch.Position3(x, y, self.vertical_separation) for x, y in self.led_xy]

    def budget_for(self, gains_sq_sorted: np.ndarray) -> link.LinkBudget:
        return link.LinkBudget(
            led_power=self.device.led_optical_power,
            noise_power=self.noise_power,
            bandwidth=self.bandwidth,
            gains_sq=gains_sq_sorted,
        )


def default_scenario(**overrides) -> ScenarioConfig:
    """The shipped indoor setup: 3 x 3 m room, two ceiling LEDs, 2 m drop.

    Keyword overrides replace individual fields, e.g.
    default_scenario(trials=500, seed=7).
    """
    base = ScenarioConfig(
        room_x=3.0,
        room_y=3.0,
        led_xy=((1.0, 1.0), (2.0, 2.0)),
        vertical_separation=2.0,
        device=ch.DeviceParams(
            pd_area=1e-4,                       # 1 cm^2
            responsivity=0.53,                  # A/W
            half_intensity_angle=np.radians(60.0),
            fov_semi_angle=np.radians(60.0),
            refractive_index=1.5,
            optical_filter_gain=1.0,
            led_optical_power=10.0,             # W
        ),
        noise_psd=1e-21,
        bandwidth=20e6,
        user_counts=(2, 3, 4, 5, 6, 7, 8),
        trials=10000,
        seed=20260808,
        strategies=(
            StrategySpec(name="fpa", mu=0.2),
            StrategySpec(name="sfpa", beta=1.0),
            StrategySpec(name="grpa"),
            StrategySpec(name="ngdpa"),
            StrategySpec(name="epa", sinr_target_db=1.0),
        ),
    )
    return replace(base, **overrides) if overrides else base


def place_users(rng: np.random.Generator, count: int, room_x: float,
                room_y: float) -> list:
    """count i.i.d. uniform positions on the receiver plane (z = 0)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    xy = rng.uniform(low=0.0, high=[room_x, room_y], size=(count, 2))
    return [ch.Position3(float(x), float(y), 0.0) for x, y in xy]


@dataclass(frozen=True)
class TrialResult:
    """One placement evaluated under every strategy on the same SIC order.

    rates[name] is None when that strategy was infeasible for this trial
    (EPA target exceeding the power budget).
    """

    positions: tuple
    gains: ch.ChannelGains
    budget: link.LinkBudget
    alphas: dict
    rates: dict

    @property
    def infeasible(self) -> set:
        return {name for name, r in self.rates.items() if r is None}


def run_trial(config: ScenarioConfig, positions, strategies=None) -> TrialResult:
    """Evaluate one fixed placement under every strategy.

    The channel is computed once; every strategy sees the same sorted gains
    and the same SIC order. Rates always use the exact SINR expression.
    """
    specs = config.strategies if strategies is None else tuple(strategies)
    gains = ch.combined_gains(config.led_positions, positions, config.device)
    budget = config.budget_for(gains.sorted_combined_sq)
    alphas: dict = {}
    rates: dict = {}
    for spec in specs:
        try:
            coeffs = strategy_coefficients(
                spec, budget.gains_sq, config.noise_power,
                config.device.led_optical_power,
            )
        except InfeasibleAllocationError:
            alphas[spec.name] = None
            rates[spec.name] = None
            continue
        alphas[spec.name] = coeffs
        rates[spec.name] = link.user_rates(coeffs, budget)
    return TrialResult(
        positions=tuple(positions), gains=gains, budget=budget,
        alphas=alphas, rates=rates,
    )


@dataclass(frozen=True)
class SweepRow:
    """Statistics for one (user count, strategy) cell, rates in bits/s."""

    user_count: int
    strategy: str
    avg_sum_rate: float
    avg_min_rate: float
    avg_rank_rates: tuple
    fairness: float
    infeasible_fraction: float
    se_sum_rate: float
    se_min_rate: float
    trial_count: int
    infeasible_count: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    metadata: dict

    def row(self, user_count: int, strategy: str) -> SweepRow:
        for r in self.rows:
            if r.user_count == user_count and r.strategy == strategy:
                return r
        raise KeyError(f"no row for K={user_count}, strategy={strategy!r}")


def _batch_sizes(total: int) -> list:
    sizes = [BATCH_TRIALS] * (total // BATCH_TRIALS)
    if total % BATCH_TRIALS:
        sizes.append(total % BATCH_TRIALS)
    return sizes


def _run_batch(config: ScenarioConfig, k_index: int, batch_index: int,
               size: int) -> dict:
    """One batch of trials for one user count; returns per-strategy accumulators."""
    n_users = config.user_counts[k_index]
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(config.seed, spawn_key=(k_index, batch_index))
    ))
    user_xy = rng.uniform(
        low=0.0, high=[config.room_x, config.room_y], size=(size, n_users, 2)
    )
    combined = ch.plane_combined_sq(
        np.asarray(config.led_xy, dtype=float), user_xy,
        config.vertical_separation, config.device,
    )
    gains_sorted = np.sort(combined, axis=-1)
    p_o = config.device.led_optical_power
    sigma2 = config.noise_power
    accs = {}
    for spec in config.strategies:
        alpha, feasible = strategy_alpha(spec, gains_sorted, sigma2, p_o)
        acc = RankAccumulator.empty(n_users)
        n_bad = int(np.count_nonzero(~feasible))
        if n_bad:
            acc.add_infeasible(n_bad)
            alpha = alpha[feasible]
            g = gains_sorted[feasible]
        else:
            g = gains_sorted
        if alpha.shape[0]:
            sinr = link.sinr_vector(alpha, g, p_o, sigma2)
            rates = link.achievable_rate(sinr, config.bandwidth)
            acc.add_sorted_batch(np.sort(rates, axis=-1))
        accs[spec.name] = acc
    return accs


def run_sweep(config: ScenarioConfig, threads: int = 1) -> SweepResult:
    """Full Monte Carlo sweep over user counts and strategies.

    The result is a pure function of (config, seed): jobs form a fixed
    (K, batch) grid, each with its own counter-based substream, and are
    reduced in grid order no matter which worker ran them.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    sizes = _batch_sizes(config.trials)
    jobs = [
        (k_index, batch_index, size)
        for k_index in range(len(config.user_counts))
        for batch_index, size in enumerate(sizes)
    ]
    if threads == 1:
        results = [_run_batch(config, *job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: _run_batch(config, *j), jobs))

    totals = {
        (k, spec.name): RankAccumulator.empty(k)
        for k in config.user_counts
        for spec in config.strategies
    }
    for job, batch_accs in zip(jobs, results):
        n_users = config.user_counts[job[0]]
        for name, acc in batch_accs.items():
            totals[(n_users, name)].merge(acc)

    rows = []
    for n_users in config.user_counts:
        for spec in config.strategies:
            acc = totals[(n_users, spec.name)]
            if acc.trial_count == 0:
                rows.append(_all_infeasible_row(n_users, spec.name, acc))
                continue
            stats = acc.finalize()
            rows.append(SweepRow(
                user_count=n_users,
                strategy=spec.name,
                avg_sum_rate=stats.avg_sum_rate,
                avg_min_rate=stats.avg_min_rate,
                avg_rank_rates=tuple(stats.avg_rank_rates),
                fairness=stats.fairness,
                infeasible_fraction=stats.infeasible_fraction,
                se_sum_rate=stats.se_sum_rate,
                se_min_rate=stats.se_min_rate,
                trial_count=stats.trial_count,
                infeasible_count=stats.infeasible_count,
            ))
    metadata = {
        "tool": "vlcnoma",
        "seed": config.seed,
        "rng": RNG_DESCRIPTION,
        "trials_per_user_count": config.trials,
        "user_counts": list(config.user_counts),
        "strategies": [s.name for s in config.strategies],
    }
    return SweepResult(rows=tuple(rows), metadata=metadata)


def _all_infeasible_row(n_users: int, name: str, acc: RankAccumulator) -> SweepRow:
    nan = float("nan")
    return SweepRow(
        user_count=n_users, strategy=name,
        avg_sum_rate=nan, avg_min_rate=nan,
        avg_rank_rates=(nan,) * n_users,
        fairness=nan, infeasible_fraction=1.0,
        se_sum_rate=nan, se_min_rate=nan,
        trial_count=0, infeasible_count=acc.infeasible_count,
    )
