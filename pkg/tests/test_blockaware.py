import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partsim.blockaware import (
    BlockAwareConfig,
    Estimator,
    NodeClock,
    check,
    expected_height,
    false_positive_rate,
)
from partsim.errors import ParameterError

FLOOR = BlockAwareConfig(estimator=Estimator.FLOOR)
ROUND = BlockAwareConfig(estimator=Estimator.ROUND)


class TestExpectedHeight:
    def test_zero_elapsed(self):
        clock = NodeClock(500, 100.0, 100.0)
        assert expected_height(clock, FLOOR) == 500

    def test_exact_intervals(self):
        clock = NodeClock(500_000, 0.0, 3000.0)
        assert expected_height(clock, FLOOR) == 500_005

    def test_fractional_interval_both_estimators(self):
        clock = NodeClock(100, 0.0, 899.0)
        # 899/600 = 1.498...: floor gives 1, round half-up also gives 1
        assert expected_height(clock, FLOOR) == 101
        assert expected_height(clock, ROUND) == 101

    def test_round_half_up(self):
        clock = NodeClock(100, 0.0, 900.0)
        assert expected_height(clock, FLOOR) == 101
        assert expected_height(clock, ROUND) == 102

    def test_monotone_in_now(self):
        heights = [
            expected_height(NodeClock(10, 0.0, t), FLOOR) for t in range(0, 5000, 17)
        ]
        assert all(b >= a for a, b in zip(heights, heights[1:]))


class TestCheck:
    def test_in_sync_ok(self):
        clock = NodeClock(500_000, 0.0, 0.0)
        assert not check(500_000, clock, FLOOR).alert

    def test_alert_with_lag(self):
        clock = NodeClock(500_002, 0.0, 1800.0)  # expected 500_005
        result = check(500_002, clock, FLOOR)
        assert result.alert and result.estimated_lag == 3

    def test_below_threshold_ok(self):
        clock = NodeClock(500_004, 0.0, 600.0)  # expected 500_005, lag 1 < 2
        assert not check(500_004, clock, FLOOR).alert

    @settings(max_examples=60, deadline=None)
    @given(
        local=st.integers(0, 100),
        lower=st.integers(0, 100),
        height=st.integers(0, 100),
        elapsed=st.floats(0, 10_000),
        threshold=st.integers(1, 5),
    )
    def test_monotone_in_local_height(self, local, lower, height, elapsed, threshold):
        cfg = BlockAwareConfig(alert_threshold=threshold)
        clock = NodeClock(height, 0.0, elapsed)
        if check(local, clock, cfg).alert:
            assert check(local - lower, clock, cfg).alert


class TestFalsePositiveRate:
    def test_unreachable_threshold(self):
        cfg = BlockAwareConfig(alert_threshold=10**6)
        assert false_positive_rate(cfg, 600.0, 500, seed=1) == 0.0

    def test_poisson_zero_count_oracle(self):
        # alert at threshold 1 after one interval requires zero arrivals:
        # P = e^{-1}
        cfg = BlockAwareConfig(alert_threshold=1, estimator=Estimator.FLOOR)
        rate = false_positive_rate(cfg, 600.0, 100_000, seed=7)
        assert rate == pytest.approx(math.exp(-1), abs=0.01)

    def test_poisson_two_interval_oracle(self):
        # threshold 2 over two intervals: no arrival in 1200 s, P = e^{-2}
        cfg = BlockAwareConfig(alert_threshold=2, estimator=Estimator.FLOOR)
        rate = false_positive_rate(cfg, 1200.0, 100_000, seed=7)
        assert rate == pytest.approx(math.exp(-2), abs=0.01)

    def test_nonincreasing_in_threshold_crn(self):
        rates = [
            false_positive_rate(
                BlockAwareConfig(alert_threshold=k), 1800.0, 20_000, seed=11
            )
            for k in range(1, 6)
        ]
        assert all(b <= a for a, b in zip(rates, rates[1:]))

    def test_deterministic_per_seed(self):
        cfg = BlockAwareConfig(alert_threshold=1)
        assert false_positive_rate(cfg, 600.0, 5000, seed=3) == false_positive_rate(
            cfg, 600.0, 5000, seed=3
        )

    def test_bad_trials(self):
        with pytest.raises(ParameterError):
            false_positive_rate(FLOOR, 600.0, 0, seed=1)


class TestConfigValidation:
    def test_bad_interval(self):
        with pytest.raises(ParameterError):
            BlockAwareConfig(expected_block_interval=0)

    def test_bad_threshold(self):
        with pytest.raises(ParameterError):
            BlockAwareConfig(alert_threshold=0)
