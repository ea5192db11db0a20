"""Lag-detection countermeasure: estimate expected chain height from elapsed time.

A node that knows when it last accepted a block can estimate how many blocks
the network has produced since (elapsed time / expected block interval) and
alert when its local height falls behind that estimate by a threshold.
Alerts are advisory; response policy is out of scope.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum

from .errors import ParameterError


class Estimator(str, Enum):
    """How fractional elapsed intervals are turned into block counts."""

    FLOOR = "floor"
    ROUND = "round"  # half-up


@dataclass(frozen=True)
class BlockAwareConfig:
    expected_block_interval: float = 600.0
    alert_threshold: int = 2
    estimator: Estimator = Estimator.FLOOR

    def __post_init__(self):
        if self.expected_block_interval <= 0:
            raise ParameterError("expected_block_interval must be > 0")
        if self.alert_threshold < 1:
            raise ParameterError("alert_threshold must be >= 1")


@dataclass(frozen=True)
class NodeClock:
    """What the checker knows: the last sync point and the current time."""

    last_sync_height: int
    last_sync_time: float
    now: float

    def __post_init__(self):
        if self.now < self.last_sync_time:
            raise ParameterError("now must be >= last_sync_time")


def _estimate_blocks(elapsed: float, cfg: BlockAwareConfig) -> int:
    x = elapsed / cfg.expected_block_interval
    if cfg.estimator is Estimator.FLOOR:
        return math.floor(x)
    return math.floor(x + 0.5)


def expected_height(clock: NodeClock, cfg: BlockAwareConfig) -> int:
    """Expected network height given time elapsed since the last sync point."""
    return clock.last_sync_height + _estimate_blocks(clock.now - clock.last_sync_time, cfg)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one lag check; ``estimated_lag`` is meaningful when alerting."""

    alert: bool
    estimated_lag: int


def check(local_height: int, clock: NodeClock, cfg: BlockAwareConfig) -> CheckResult:
    """Alert when expected height exceeds the local view by the threshold."""
    lag = expected_height(clock, cfg) - local_height
    return CheckResult(alert=lag >= cfg.alert_threshold, estimated_lag=lag)


def false_positive_rate(
    cfg: BlockAwareConfig, horizon: float, trials: int, seed: int
) -> float:
    """Monte Carlo alert probability for a perfectly synchronized node.

    Each trial draws Poisson block arrivals (mean spacing = the expected
    interval) over [0, horizon]; the node tracks the true height exactly and
    runs a single check at the horizon, with the clock referenced to the last
    arrival (time 0 when none occurred). An alert is by construction a false
    positive. Deterministic per seed; shared seeds give common random numbers
    across thresholds.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if horizon < 0:
        raise ParameterError("horizon must be >= 0")
    rng = random.Random(seed)
    rate = 1.0 / cfg.expected_block_interval
    alerts = 0
    for _ in range(trials):
        t = 0.0
        height = 0
        last_arrival = 0.0
        while True:
            t += rng.expovariate(rate)
            if t > horizon:
                break
            height += 1
            last_arrival = t
        clock = NodeClock(last_sync_height=height, last_sync_time=last_arrival, now=horizon)
        if check(height, clock, cfg).alert:
            alerts += 1
    return alerts / trials
