import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlcnoma.metrics import RankAccumulator, jain_index


class TestJainIndex:
    def test_equal_rates_give_one(self):
        assert jain_index([5.0, 5.0, 5.0]) == pytest.approx(1.0, rel=1e-12)

    def test_monopoly_gives_one_over_k(self):
        assert jain_index([0.0, 0.0, 0.0, 7.0]) == pytest.approx(0.25, rel=1e-12)

    def test_worked_example(self):
        assert jain_index([1.0, 3.0]) == pytest.approx(0.8, rel=1e-12)

    def test_single_user(self):
        assert jain_index([42.0]) == pytest.approx(1.0, rel=1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            jain_index([0.0, 0.0])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            jain_index([1.0, -1.0])

    @given(st.lists(st.floats(min_value=0.0, max_value=1e6), min_size=1, max_size=24)
           .filter(lambda r: sum(v * v for v in r) > 0))
    def test_bounds(self, rates):
        f = jain_index(rates)
        assert 1.0 / len(rates) - 1e-12 <= f <= 1.0 + 1e-12

    @given(st.lists(st.floats(min_value=1e-3, max_value=1e6), min_size=1, max_size=24),
           st.floats(min_value=1e-6, max_value=1e6))
    def test_scale_invariance(self, rates, c):
        r = np.asarray(rates)
        assert jain_index(c * r) == pytest.approx(jain_index(r), rel=1e-12)


class TestAccumulate:
    def test_sorts_before_ranking(self):
        acc = RankAccumulator.empty(3)
        acc.add([3.0, 1.0, 2.0])
        np.testing.assert_array_equal(acc.per_rank_sums, [1.0, 2.0, 3.0])
        assert acc.sum_rate_total == 6.0
        assert acc.min_rate_total == 1.0
        assert acc.trial_count == 1

    def test_two_identical_trials_double(self):
        acc = RankAccumulator.empty(3)
        acc.add([3.0, 1.0, 2.0])
        acc.add([3.0, 1.0, 2.0])
        np.testing.assert_array_equal(acc.per_rank_sums, [2.0, 4.0, 6.0])
        assert acc.trial_count == 2

    def test_permutation_insensitive(self):
        a, b = RankAccumulator.empty(4), RankAccumulator.empty(4)
        rates = [4.0, 0.5, 2.0, 1.0]
        a.add(rates)
        b.add(rates[::-1])
        np.testing.assert_array_equal(a.per_rank_sums, b.per_rank_sums)
        assert a.sum_rate_total == b.sum_rate_total
        assert a.min_rate_total == b.min_rate_total

    def test_wrong_length_rejected(self):
        acc = RankAccumulator.empty(2)
        with pytest.raises(ValueError):
            acc.add([1.0, 2.0, 3.0])


class TestFinalize:
    def test_single_trial_passthrough(self):
        acc = RankAccumulator.empty(2)
        acc.add([2e6, 8e6])
        stats = acc.finalize()
        assert stats.avg_sum_rate == 10e6
        assert stats.avg_min_rate == 2e6
        np.testing.assert_array_equal(stats.avg_rank_rates, [2e6, 8e6])
        assert stats.se_sum_rate == 0.0

    def test_single_rank_fairness_is_one(self):
        acc = RankAccumulator.empty(1)
        acc.add([5e6])
        assert acc.finalize().fairness == pytest.approx(1.0, rel=1e-12)

    def test_two_trials_fairness_composition(self):
        # per-rank averages (1, 3) -> Jain 0.8
        acc = RankAccumulator.empty(2)
        acc.add([0.5, 2.0])
        acc.add([1.5, 4.0])
        assert acc.finalize().fairness == pytest.approx(0.8, rel=1e-12)

    def test_min_rate_equals_rank1_average(self):
        rng = np.random.default_rng(2)
        acc = RankAccumulator.empty(5)
        for _ in range(100):
            acc.add(rng.uniform(0.0, 1e8, size=5))
        stats = acc.finalize()
        assert stats.avg_min_rate == pytest.approx(stats.avg_rank_rates[0], rel=1e-12)

    def test_sum_rate_linearity(self):
        rng = np.random.default_rng(3)
        acc = RankAccumulator.empty(4)
        for _ in range(257):
            acc.add(rng.uniform(0.0, 1e8, size=4))
        stats = acc.finalize()
        assert stats.avg_sum_rate == pytest.approx(
            float(np.sum(stats.avg_rank_rates)), rel=1e-9)

    def test_known_standard_error(self):
        # two trials with sums 6 and 10: se = |6 - 10| / 2 = 2
        acc = RankAccumulator.empty(2)
        acc.add([2.0, 4.0])
        acc.add([4.0, 6.0])
        assert acc.finalize().se_sum_rate == pytest.approx(2.0, rel=1e-12)

    def test_empty_accumulator_rejected(self):
        with pytest.raises(ValueError):
            RankAccumulator.empty(3).finalize()

    def test_infeasible_fraction(self):
        acc = RankAccumulator.empty(2)
        acc.add([1.0, 2.0])
        acc.add_infeasible(3)
        stats = acc.finalize()
        assert stats.infeasible_fraction == pytest.approx(0.75)
        assert stats.infeasible_count == 3

    def test_all_zero_rates_yield_nan_fairness(self):
        acc = RankAccumulator.empty(2)
        acc.add([0.0, 0.0])
        assert math.isnan(acc.finalize().fairness)


class TestMerge:
    def _filled(self, seed, n_trials):
        rng = np.random.default_rng(seed)
        acc = RankAccumulator.empty(3)
        acc.add_sorted_batch(np.sort(rng.uniform(0, 1e8, size=(n_trials, 3)), axis=-1))
        return acc

    def test_merge_is_commutative(self):
        a1, b1 = self._filled(1, 40), self._filled(2, 17)
        a2, b2 = self._filled(1, 40), self._filled(2, 17)
        a1.merge(b1)
        b2.merge(a2)
        np.testing.assert_array_equal(a1.per_rank_sums, b2.per_rank_sums)
        assert a1.sum_rate_total == b2.sum_rate_total
        assert a1.trial_count == b2.trial_count

    def test_merge_matches_sequential(self):
        merged = self._filled(1, 40)
        merged.merge(self._filled(2, 17))
        rng1, rng2 = np.random.default_rng(1), np.random.default_rng(2)
        seq = RankAccumulator.empty(3)
        seq.add_sorted_batch(np.sort(rng1.uniform(0, 1e8, size=(40, 3)), axis=-1))
        seq.add_sorted_batch(np.sort(rng2.uniform(0, 1e8, size=(17, 3)), axis=-1))
        np.testing.assert_allclose(merged.per_rank_sums, seq.per_rank_sums, rtol=1e-12)
        assert merged.trial_count == seq.trial_count

    def test_rank_mismatch_rejected(self):
        with pytest.raises(ValueError):
            RankAccumulator.empty(2).merge(RankAccumulator.empty(3))

    def test_empty_batch_is_noop(self):
        acc = RankAccumulator.empty(2)
        acc.add_sorted_batch(np.empty((0, 2)))
        assert acc.trial_count == 0
