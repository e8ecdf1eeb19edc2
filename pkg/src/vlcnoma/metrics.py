"""Trial aggregation: per-rank average rates, sum/min rates, Jain fairness.

Each trial's rate vector is sorted ascending before it is accumulated, so
rank i always means "i-th lowest instantaneous rate". With users placed
i.i.d. this rank ordering is what keeps the disparity visible: raw per-user
averages would wash out to near-perfect fairness by symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["RankAccumulator", "AggregateStats", "jain_index"]


def jain_index(avg_rates) -> float:
    """Jain fairness (sum r)^2 / (K sum r^2); 1 = equal, 1/K = monopolized."""
    r = np.asarray(avg_rates, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise ValueError("avg_rates must be a non-empty 1-D vector")
    if np.any(r < 0.0) or not np.all(np.isfinite(r)):
        raise ValueError("rates must be finite and non-negative")
    sum_sq = float(np.sum(r * r))
    if sum_sq == 0.0:
        raise ValueError("Jain index undefined when every rate is zero")
    total = float(np.sum(r))
    return total * total / (r.size * sum_sq)


@dataclass(frozen=True)
class AggregateStats:
    """Finalized statistics for one (user count, strategy) cell."""

    trial_count: int
    infeasible_count: int
    avg_rank_rates: np.ndarray  # bits/s, rank 1 (lowest) first
    avg_sum_rate: float         # bits/s
    avg_min_rate: float         # bits/s
    fairness: float
    infeasible_fraction: float
    se_sum_rate: float
    se_min_rate: float


@dataclass
class RankAccumulator:
    """Running totals over trials; merge order is fixed by the caller."""

    per_rank_sums: np.ndarray
    trial_count: int = 0
    sum_rate_total: float = 0.0
    sum_rate_sq_total: float = 0.0
    min_rate_total: float = 0.0
    min_rate_sq_total: float = 0.0
    infeasible_count: int = 0

    @classmethod
    def empty(cls, n_ranks: int) -> "RankAccumulator":
        if n_ranks < 1:
            raise ValueError("n_ranks must be >= 1")
        return cls(per_rank_sums=np.zeros(n_ranks))

    def add(self, rates) -> None:
        """Fold in one trial's rate vector (any rank order; sorted here)."""
        r = np.asarray(rates, dtype=float)
        if r.shape != self.per_rank_sums.shape:
            raise ValueError(
                f"expected {self.per_rank_sums.shape[0]} rates, got shape {r.shape}"
            )
        self.add_sorted_batch(np.sort(r)[None, :])

    def add_sorted_batch(self, sorted_rates: np.ndarray) -> None:
        """Fold in (B, K) rates already sorted ascending within each row."""
        if sorted_rates.ndim != 2 or sorted_rates.shape[1] != self.per_rank_sums.size:
            raise ValueError("sorted_rates must be (B, n_ranks)")
        if sorted_rates.shape[0] == 0:
            return
        self.per_rank_sums += sorted_rates.sum(axis=0)
        sums = sorted_rates.sum(axis=1)
        mins = sorted_rates[:, 0]
        self.sum_rate_total += float(sums.sum())
        self.sum_rate_sq_total += float((sums * sums).sum())
        self.min_rate_total += float(mins.sum())
        self.min_rate_sq_total += float((mins * mins).sum())
        self.trial_count += sorted_rates.shape[0]

    def add_infeasible(self, count: int = 1) -> None:
        self.infeasible_count += count

    def merge(self, other: "RankAccumulator") -> None:
        """Element-wise sums; call in a fixed order for reproducible floats."""
        if other.per_rank_sums.shape != self.per_rank_sums.shape:
            raise ValueError("cannot merge accumulators of different rank counts")
        self.per_rank_sums += other.per_rank_sums
        self.trial_count += other.trial_count
        self.sum_rate_total += other.sum_rate_total
        self.sum_rate_sq_total += other.sum_rate_sq_total
        self.min_rate_total += other.min_rate_total
        self.min_rate_sq_total += other.min_rate_sq_total
        self.infeasible_count += other.infeasible_count

    def finalize(self) -> AggregateStats:
        """Averages, fairness over per-rank averages, and standard errors."""
        n = self.trial_count
        if n == 0:
            raise ValueError("cannot finalize an empty accumulator")
        avg_rank = self.per_rank_sums / n
        if np.any(avg_rank > 0.0):
            fairness = jain_index(avg_rank)
        else:
            fairness = math.nan  # degenerate all-dark scenario
        attempted = n + self.infeasible_count
        return AggregateStats(
            trial_count=n,
            infeasible_count=self.infeasible_count,
            avg_rank_rates=avg_rank,
            avg_sum_rate=self.sum_rate_total / n,
            avg_min_rate=self.min_rate_total / n,
            fairness=fairness,
            infeasible_fraction=self.infeasible_count / attempted,
            se_sum_rate=_std_err(self.sum_rate_total, self.sum_rate_sq_total, n),
            se_min_rate=_std_err(self.min_rate_total, self.min_rate_sq_total, n),
        )


def _std_err(total: float, sq_total: float, n: int) -> float:
    """Standard error of the mean; 0 when a variance is not estimable."""
    if n < 2:
        return 0.0
    mean = total / n
    var = max(0.0, (sq_total - n * mean * mean) / (n - 1))
    return math.sqrt(var / n)
