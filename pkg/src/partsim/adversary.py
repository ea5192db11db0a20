"""The three attack classes as declarative scenarios plus outcome economics.

Scenarios are plain dataclasses consumed by the simulation engine; this
module also provides standalone entry points that run a single attack on a
given topology and return its outcome, and the attacker cost/benefit
arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DomainError, ParameterError
from .simulation import SimNode, SimParams, TraceLog
from .topology import AttributionPolicy, MiningPool, POOLS_2018, isolated_hash_rate

__all__ = [
    "SpatialScenario",
    "TemporalScenario",
    "LogicalScenario",
    "FixedShare",
    "PreferentialByFeature",
    "PartitionOutcome",
    "TemporalOutcome",
    "LogicalOutcome",
    "EconomicParams",
    "ValueAtRisk",
    "isolated_hash_rate",
    "spatial_hijack",
    "temporal_feed",
    "logical_release",
    "value_at_risk",
]


@dataclass(frozen=True)
class SpatialScenario:
    """Sever every link crossing the target-AS boundary for the window."""

    label: str
    as_set: tuple[int, ...]
    start: float
    duration: float
    kind: str = "spatial"


@dataclass(frozen=True)
class TemporalScenario:
    """Feed counterfeit private-fork blocks to nodes at or above a lag bucket.

    The adversary forks each victim's chain at its current height and mines
    on it at ``adversary_hash_share`` times the network rate, delivering with
    zero delay (a direct connection), which makes reported subversion rates
    an upper bound. Counterfeit heights never exceed the honest tip: the
    attack impersonates blocks the victim is missing, so a fully synced
    victim always rejects by the first-seen tie rule.
    """

    label: str
    min_lag_bucket: int
    adversary_hash_share: float
    start: float
    duration: float
    kind: str = "temporal"


@dataclass(frozen=True)
class FixedShare:
    """Every node adopts the malicious client independently with probability p."""

    p: float
    kind: str = "fixed_share"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("adoption probability must be in [0,1]")


@dataclass(frozen=True)
class PreferentialByFeature:
    """Feature-led adoption: nodes not on the current client take the bait
    with probability p_base + boost, current-client nodes with p_base."""

    p_base: float
    boost: float
    current_version: str
    kind: str = "preferential"

    def __post_init__(self):
        if not 0.0 <= self.p_base <= 1.0:
            raise ParameterError("p_base must be in [0,1]")
        if self.boost < 0:
            raise ParameterError("boost must be >= 0")


@dataclass(frozen=True)
class LogicalScenario:
    """Release a malicious client version; nodes adopt per the model."""

    label: str
    malicious_version: str
    adoption: FixedShare | PreferentialByFeature
    start: float
    kind: str = "logical"


@dataclass(frozen=True)
class PartitionOutcome:
    isolated_node_fraction: float
    isolated_hash_fraction: float
    fork_formed: bool
    reorg_depth_on_heal: int


@dataclass(frozen=True)
class TemporalOutcome:
    victims: int
    subverted: int
    victims_by_bucket: dict
    subverted_by_bucket: dict


@dataclass(frozen=True)
class LogicalOutcome:
    compromised_count: int
    compromised_fraction: float
    compromised_ids: tuple[str, ...]


def _outcome_of(trace: TraceLog, attack: str, label: str) -> dict:
    for rec in trace.outcomes():
        if rec["attack"] == attack and rec["label"] == label:
            return rec
    raise DomainError(f"trace has no {attack} outcome for {label!r}")


def spatial_hijack(
    nodes: Sequence[SimNode],
    params: SimParams,
    as_set: Sequence[int],
    window: tuple[float, float],
    pools: Sequence[MiningPool] = POOLS_2018,
    attribution: AttributionPolicy = AttributionPolicy.VIEW_UNION,
) -> PartitionOutcome:
    """Run one simulation with a single AS hijack and return its outcome.

    Hijacking ASes that host neither nodes nor pool locations isolates
    nothing and is answered without running the engine.
    """
    from . import simulation

    hosted = {n.asn for n in nodes} | {a for p in pools for a in p.asns}
    if not set(as_set) & hosted:
        return PartitionOutcome(0.0, 0.0, False, 0)
    start, duration = window
    sc = SpatialScenario("hijack", tuple(as_set), start, duration)
    trace = simulation.run(nodes, params, [sc], pools=pools, attribution=attribution)
    rec = _outcome_of(trace, "spatial", "hijack")
    return PartitionOutcome(
        isolated_node_fraction=rec["isolated_node_fraction"],
        isolated_hash_fraction=rec["isolated_hash_fraction"],
        fork_formed=rec["fork_formed"],
        reorg_depth_on_heal=rec["reorg_depth_on_heal"],
    )


def temporal_feed(
    nodes: Sequence[SimNode],
    params: SimParams,
    victim_filter: int,
    adversary_hash_share: float,
    window: tuple[float, float],
    pools: Sequence[MiningPool] = POOLS_2018,
) -> TemporalOutcome:
    """Run one simulation with a single counterfeit-feed attack."""
    from . import simulation

    start, duration = window
    sc = TemporalScenario("feed", victim_filter, adversary_hash_share, start, duration)
    trace = simulation.run(nodes, params, [sc], pools=pools)
    rec = _outcome_of(trace, "temporal", "feed")
    return TemporalOutcome(
        victims=rec["victims"],
        subverted=rec["subverted"],
        victims_by_bucket=rec["victims_by_bucket"],
        subverted_by_bucket=rec["subverted_by_bucket"],
    )


def logical_release(
    nodes: Sequence[SimNode],
    malicious_version: str,
    adoption: FixedShare | PreferentialByFeature,
    rng: random.Random,
) -> LogicalOutcome:
    """Sample which nodes adopt the malicious client (pure, state-free)."""
    adopters = []
    for node in nodes:
        if adoption.kind == "fixed_share":
            p = adoption.p
        else:
            p = adoption.p_base
            if node.version != adoption.current_version:
                p = min(1.0, adoption.p_base + adoption.boost)
        if rng.random() < p:
            adopters.append(node.node_id)
    if not nodes:
        raise DomainError("no nodes")
    return LogicalOutcome(
        compromised_count=len(adopters),
        compromised_fraction=len(adopters) / len(nodes),
        compromised_ids=tuple(adopters),
    )


@dataclass(frozen=True)
class EconomicParams:
    """Inputs to the asymmetric-vulnerability arithmetic.

    Attack costs are user-supplied configuration, not estimates: the only
    modeling commitment is that cost scales linearly with hijacked ASes for
    the spatial attack and is a flat figure per attack kind otherwise.
    """

    market_cap: float
    node_count: int
    hijack_cost_per_as: float = 0.0
    temporal_cost: float = 0.0
    logical_cost: float = 0.0

    def __post_init__(self):
        if self.node_count <= 0:
            raise DomainError("node_count must be > 0")
        if self.market_cap < 0:
            raise ParameterError("market_cap must be >= 0")


@dataclass(frozen=True)
class ValueAtRisk:
    per_node_value: float
    value_at_risk: float
    cost: float
    benefit_ratio: float


def value_at_risk(
    econ: EconomicParams, affected_count: int, cost: float
) -> ValueAtRisk:
    """Value exposed by an attack versus its cost.

    Evaluation order is fixed: per-node value = market_cap / node_count,
    then value at risk = per-node value * affected count.
    """
    if affected_count < 0:
        raise ParameterError("affected_count must be >= 0")
    per_node = econ.market_cap / econ.node_count
    var = per_node * affected_count
    ratio = var / cost if cost > 0 else float("inf") if var > 0 else 0.0
    return ValueAtRisk(per_node, var, cost, ratio)


def cost_of(econ: EconomicParams, outcome_record: Mapping) -> float:
    """Configured attack cost for one trace outcome record."""
    attack = outcome_record["attack"]
    if attack == "spatial":
        return econ.hijack_cost_per_as * len(outcome_record.get("as_set", ()))
    if attack == "temporal":
        return econ.temporal_cost
    return econ.logical_cost
