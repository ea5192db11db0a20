"""Discrete-event engine: block mining, gossip, churn, and per-node chain views.

Chain state is abstracted to (fork_id, height, fork_point); reorg depth is
height minus fork point. Propagation is a flood with per-edge delays by
bandwidth class. A gossiped block applies only when it directly extends the
receiving node's chain; nodes that fall further behind (churn, missed
deliveries) close the gap through catch-up steps paced at a configurable
number of seconds per block, which models header/block re-sync and is the
main calibration knob for the steady-state lag distribution.

Mining is a Poisson process with the configured expected interval; the
winning pool is drawn proportionally to hash share, with the unattributed
remainder acting as a diffuse "others" pool whose blocks originate at a
uniformly random online node. One run is single-threaded and fully
deterministic for a fixed seed; concurrent runs must not share state.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, DomainError, ParameterError
from .topology import (
    AttributionPolicy,
    MiningPool,
    NetworkSnapshot,
    POOLS_2018,
    isolated_hash_rate,
)
from . import blockaware as ba

#: Lag bucket labels: up to date, 1 behind, 2-4, 5-10, 11 or more.
BUCKET_LABELS = ("b0", "b1", "b2", "b3", "b4")

#: Reserved pool name for the unattributed hash-rate remainder.
OTHERS_POOL = "others"

HONEST_FORK = 0


def lag_bucket(lag: int) -> int:
    """Bucket index for a block lag; 10 falls in b3, b4 starts at 11."""
    if lag <= 0:
        return 0
    if lag == 1:
        return 1
    if lag <= 4:
        return 2
    if lag <= 10:
        return 3
    return 4


@dataclass
class ChainView:
    """A node's believed best chain."""

    fork_id: int = HONEST_FORK
    height: int = 0
    fork_point: int = 0

    def __post_init__(self):
        if self.fork_point > self.height:
            raise ParameterError("fork_point must be <= height")


@dataclass
class SimNode:
    node_id: str
    asn: int
    org: str
    version: str = ""
    online: bool = True
    view: ChainView = field(default_factory=ChainView)
    peers: tuple[str, ...] = ()
    bandwidth_class: str = "fast"
    address: str = ""


@dataclass(frozen=True)
class SimEvent:
    """One scheduled event; ties in time are broken by scheduling order."""

    time: float
    kind: str
    data: dict


@dataclass(frozen=True)
class SimParams:
    expected_block_interval: float = 600.0
    delay_fast: float = 2.0
    delay_slow: float = 10.0
    churn_rate: float = 0.0  # online/offline toggles per node-hour
    horizon: float = 3600.0
    seed: int = 0
    sample_interval: float = 600.0
    resync_seconds_per_block: float = 200.0
    outdegree: int = 8
    slow_fraction: float = 0.2
    gossip_fetch_limit: int = 1  # missing parents a near-tip node pulls inline

    def __post_init__(self):
        if self.expected_block_interval <= 0:
            raise ParameterError("expected_block_interval must be > 0")
        if not 0 <= self.delay_fast <= self.delay_slow:
            raise ParameterError("require delay_slow >= delay_fast >= 0")
        if self.horizon < 0:
            raise ParameterError("horizon must be >= 0")
        if self.churn_rate < 0:
            raise ParameterError("churn_rate must be >= 0")
        if self.sample_interval <= 0:
            raise ParameterError("sample_interval must be > 0")
        if self.resync_seconds_per_block <= 0:
            raise ParameterError("resync_seconds_per_block must be > 0")
        if self.outdegree < 1:
            raise ParameterError("outdegree must be >= 1")
        if not 0 <= self.slow_fraction <= 1:
            raise ParameterError("slow_fraction must be in [0,1]")
        if self.gossip_fetch_limit < 0:
            raise ParameterError("gossip_fetch_limit must be >= 0")


@dataclass(frozen=True)
class LagHistogram:
    """Lag-bucket fractions over online nodes plus the counterfeit-fork share."""

    fractions: tuple[float, float, float, float, float]
    counterfeit_fraction: float


def lag_of(node: SimNode, network_tip_height: int) -> int:
    """Lag bucket of a node relative to the network tip (clamped at zero)."""
    return lag_bucket(max(network_tip_height - node.view.height, 0))


def lag_distribution(
    nodes: Iterable[SimNode],
    network_tip_height: int,
    counterfeit_forks: Iterable[int] = (),
) -> LagHistogram:
    """Bucket fractions over online nodes; they sum to 1."""
    cf = set(counterfeit_forks)
    counts = [0, 0, 0, 0, 0]
    n_cf = 0
    total = 0
    for node in nodes:
        if not node.online:
            continue
        total += 1
        counts[lag_of(node, network_tip_height)] += 1
        if node.view.fork_id in cf:
            n_cf += 1
    if total == 0:
        raise DomainError("no online nodes")
    fractions = tuple(c / total for c in counts)
    return LagHistogram(fractions, n_cf / total)


def apply_block(node: SimNode, block: tuple[int, int, int]) -> bool:
    """Longest-chain-by-height acceptance: strictly higher wins, ties keep
    the first-seen chain. Accepting replaces the node's view."""
    fork_id, height, fork_point = block
    if height > node.view.height:
        node.view = ChainView(fork_id, height, fork_point)
        return True
    return False


def draw_winner(pool_weights: Sequence[tuple[str, float]], rng: random.Random) -> str:
    """Sample a pool name proportionally to hash share."""
    total = sum(w for _, w in pool_weights)
    if total <= 0:
        raise DomainError("zero total hash share")
    r = rng.random() * total
    acc = 0.0
    for name, w in pool_weights:
        acc += w
        if r < acc:
            return name
    return pool_weights[-1][0]


def mine_next(state, rng: random.Random) -> SimEvent:
    """Next mining event: exponential inter-arrival, winner by hash share."""
    interval = state.params.expected_block_interval
    dt = rng.expovariate(1.0 / interval)
    winner = draw_winner(state.pool_weights, rng)
    return SimEvent(time=state.now + dt, kind="block_mined", data={"pool": winner})


@dataclass
class TraceLog:
    """Ordered run records: samples, block/fork events, attack outcomes."""

    records: list[dict] = field(default_factory=list)

    def samples(self) -> list[dict]:
        return [r for r in self.records if r["kind"] == "sample"]

    def outcomes(self) -> list[dict]:
        return [r for r in self.records if r["kind"] == "attack_outcome"]

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r["kind"] == kind]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)

    @classmethod
    def from_jsonl(cls, text: str) -> "TraceLog":
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        return cls(records)


def build_sim_nodes(snapshot: NetworkSnapshot) -> list[SimNode]:
    """Seed simulation nodes from a census snapshot (peers wired at run time)."""
    return [
        SimNode(
            node_id=n.node_id,
            asn=n.asn,
            org=n.org,
            version=n.version,
            view=ChainView(HONEST_FORK, n.height, 0),
            address=n.address,
        )
        for n in snapshot.nodes
    ]


def wire_peers(nodes: Sequence[SimNode], params: SimParams, rng: random.Random) -> None:
    """Connect nodes into a ring plus random extra edges; assign bandwidth.

    The ring keeps the gossip graph connected for any seed; extra edges give
    each node roughly ``outdegree`` neighbours.
    """
    n = len(nodes)
    ids = [nd.node_id for nd in nodes]
    adj: list[set[int]] = [set() for _ in range(n)]
    if n > 1:
        for i in range(n):
            j = (i + 1) % n
            adj[i].add(j)
            adj[j].add(i)
        for i in range(n):
            for _ in range(max(params.outdegree - 1, 0)):
                j = rng.randrange(n)
                if j != i:
                    adj[i].add(j)
                    adj[j].add(i)
    slow_count = int(n * params.slow_fraction)
    slow = set(rng.sample(range(n), slow_count)) if slow_count else set()
    for i, node in enumerate(nodes):
        node.peers = tuple(sorted(ids[j] for j in adj[i]))
        node.bandwidth_class = "slow" if i in slow else "fast"


@dataclass
class _Fork:
    id: int
    kind: str  # honest | partition | counterfeit
    fork_point: int
    tip: int
    parent: int | None
    dead: bool = False


@dataclass
class _Partition:
    label: str
    as_set: frozenset[int]
    inside: dict  # node_id -> bool
    fork: _Fork
    h0: int
    node_fraction: float
    hash_fraction: float
    inside_applied: int
    outside_applied: int


@dataclass
class _Temporal:
    label: str
    share: float
    active: bool
    forks: dict  # victim node_id -> _Fork
    initial_bucket: dict  # victim node_id -> int
    subverted: dict  # victim node_id -> initial bucket


class Simulation:
    """One deterministic run. Use :func:`run` unless you need the internals."""

    def __init__(
        self,
        nodes: Sequence[SimNode],
        params: SimParams,
        scenarios: Sequence = (),
        pools: Sequence[MiningPool] = POOLS_2018,
        attribution: AttributionPolicy = AttributionPolicy.VIEW_UNION,
        aliases: Mapping[str, str] | None = None,
        blockaware_cfg: ba.BlockAwareConfig | None = None,
        export_dir: str | Path | None = None,
    ):
        if not nodes:
            raise ParameterError("topology has no nodes")
        share_sum = sum(p.hash_share for p in pools)
        if share_sum > 1.0 + 1e-9:
            raise ParameterError("pool hash shares exceed 1")
        self.params = params
        self.pools = tuple(pools)
        self.attribution = attribution
        self.aliases = aliases
        self.blockaware_cfg = blockaware_cfg
        self.export_dir = Path(export_dir) if export_dir is not None else None
        self.rng = random.Random(params.seed)
        self.now = 0.0
        self.trace = TraceLog()

        self.nodes: dict[str, SimNode] = {}
        for nd in nodes:
            if nd.node_id in self.nodes:
                raise ParameterError(f"duplicate node_id {nd.node_id!r}")
            self.nodes[nd.node_id] = replace(nd, view=replace(nd.view))
        self.node_ids = list(self.nodes)

        others = 1.0 - share_sum
        self.pool_weights: list[tuple[str, float]] = [
            (p.name, p.hash_share) for p in self.pools
        ]
        if others > 1e-12:
            self.pool_weights.append((OTHERS_POOL, others))
        self._pool_hosts: dict[str, list[str]] = {}
        for p in self.pools:
            asns = set(p.asns)
            self._pool_hosts[p.name] = [
                nid for nid in self.node_ids if self.nodes[nid].asn in asns
            ]

        known_asns = {n.asn for n in self.nodes.values()}
        for p in self.pools:
            known_asns.update(p.asns)
        _validate_scenarios(scenarios, known_asns, params.horizon)
        self.scenarios = tuple(scenarios)

        tip0 = max(n.view.height for n in self.nodes.values())
        self.forks: dict[int, _Fork] = {
            HONEST_FORK: _Fork(HONEST_FORK, "honest", 0, tip0, None)
        }
        self._alias: dict[int, int] = {}
        self._next_fork_id = 1

        self.partition: _Partition | None = None
        self.temporal: _Temporal | None = None
        self.compromised: list[str] = []

        self._heap: list = []
        self._seq = 0
        self._catchup_armed: dict[str, bool] = {nid: False for nid in self.node_ids}
        self._clock_time: dict[str, float] = {nid: 0.0 for nid in self.node_ids}

    # -- scheduling ---------------------------------------------------------

    def _push(self, t: float, kind: str, data: tuple) -> None:
        heapq.heappush(self._heap, (t, self._seq, kind, data))
        self._seq += 1

    def _new_fork(self, kind: str, fork_point: int, parent: int) -> _Fork:
        f = _Fork(self._next_fork_id, kind, fork_point, fork_point, parent)
        self._next_fork_id += 1
        self.forks[f.id] = f
        return f

    def _rid(self, fork_id: int) -> int:
        while fork_id in self._alias:
            fork_id = self._alias[fork_id]
        return fork_id

    def _edge_delay(self, a: SimNode, b: SimNode) -> float:
        if a.bandwidth_class == "slow" or b.bandwidth_class == "slow":
            return self.params.delay_slow
        return self.params.delay_fast

    def _crossing(self, a_id: str, b_id: str) -> bool:
        part = self.partition
        return part is not None and part.inside[a_id] != part.inside[b_id]

    def _side_fork(self, node: SimNode) -> _Fork:
        part = self.partition
        if part is not None and part.inside[node.node_id]:
            return part.fork
        return self.forks[HONEST_FORK]

    def _counterfeit_fork_ids(self) -> set[int]:
        return {f.id for f in self.forks.values() if f.kind == "counterfeit"}

    # -- run ----------------------------------------------------------------

    def run(self) -> TraceLog:
        params = self.params
        t = 0.0
        while t <= params.horizon:
            self._push(t, "sample", ())
            t += params.sample_interval
        for sc in self.scenarios:
            self._push(sc.start, "attack_start", (sc,))
            duration = getattr(sc, "duration", None)
            if duration is not None:
                self._push(sc.start + duration, "attack_end", (sc,))
        if params.churn_rate > 0:
            rate = params.churn_rate / 3600.0
            for nid in self.node_ids:
                self._push(self.rng.expovariate(rate), "churn", (nid,))
        for nid in self.node_ids:  # stragglers in the initial state resync
            node = self.nodes[nid]
            if node.view.height < self.forks[HONEST_FORK].tip:
                self._arm_catchup(nid, 0.0)
        ev = mine_next(self, self.rng)
        self._push(ev.time, "block_mined", (ev.data["pool"],))

        while self._heap and self._heap[0][0] <= params.horizon:
            t, _, kind, data = heapq.heappop(self._heap)
            self.now = t
            if kind == "deliver":
                self._on_deliver(t, *data)
            elif kind == "block_mined":
                self._on_block_mined(t, *data)
            elif kind == "catchup":
                self._on_catchup(t, *data)
            elif kind == "churn":
                self._on_churn(t, *data)
            elif kind == "counterfeit_mined":
                self._on_counterfeit_mined(t, *data)
            elif kind == "sample":
                self._on_sample(t)
            elif kind == "attack_start":
                self._on_attack_start(t, *data)
            elif kind == "attack_end":
                self._on_attack_end(t, *data)
        return self.trace

    # -- mining and gossip --------------------------------------------------

    def _pick_origin(self, pool_name: str) -> SimNode | None:
        hosts = self._pool_hosts.get(pool_name, [])
        candidates = [nid for nid in hosts if self.nodes[nid].online]
        if not candidates:
            candidates = [nid for nid in self.node_ids if self.nodes[nid].online]
        if not candidates:
            return None
        return self.nodes[self.rng.choice(candidates)]

    def _on_block_mined(self, t: float, pool_name: str) -> None:
        origin = self._pick_origin(pool_name)
        if origin is not None:
            fork = self._side_fork(origin)
            fork.tip += 1
            block = (fork.id, fork.tip, fork.fork_point)
            self.trace.records.append(
                {"t": t, "kind": "block_mined", "pool": pool_name,
                 "fork": fork.id, "height": fork.tip}
            )
            delay = (
                self.params.delay_slow
                if origin.bandwidth_class == "slow"
                else self.params.delay_fast
            )
            self._push(t + delay, "deliver", (block, origin.node_id, None))
        ev = mine_next(self, self.rng)
        self._push(ev.time, "block_mined", (ev.data["pool"],))

    def _on_deliver(
        self, t: float, block: tuple[int, int, int], target_id: str, sender_id: str | None
    ) -> None:
        node = self.nodes[target_id]
        if not node.online:
            return
        fork_id, height, fork_point = block
        fork = self.forks[self._rid(fork_id)]
        if fork.dead:
            return
        if sender_id is None:
            # the miner's own injection: the origin holds the chain this block
            # was mined on, so the plain height rule decides
            if height > node.view.height:
                self._accept(node, fork, height, t)
                self._forward(node, fork, height, t, None)
            return
        if self._crossing(sender_id, target_id):
            return
        view = node.view
        gap = height - view.height
        # a node close to the tip pulls the few missing parents inline; a
        # deeper gap means a real re-sync (the catch-up process)
        extends_own = fork.id == view.fork_id and 1 <= gap <= 1 + self.params.gossip_fetch_limit
        branches_here = (
            fork.parent is not None
            and self._rid(fork.parent) == view.fork_id
            and fork.fork_point == view.height
            and gap == 1
        )
        if not (extends_own or branches_here):
            # can't validate a block that doesn't build on our chain; if it
            # proves we're behind, start catching up
            if gap > 0:
                self._arm_catchup(target_id, t)
            return
        self._accept(node, fork, height, t)
        self._forward(node, fork, height, t, sender_id)

    def _forward(
        self, node: SimNode, fork: _Fork, height: int, t: float, sender_id: str | None
    ) -> None:
        block = (fork.id, height, fork.fork_point)
        for peer_id in node.peers:
            if peer_id == sender_id:
                continue
            peer = self.nodes[peer_id]
            self._push(t + self._edge_delay(node, peer), "deliver",
                       (block, peer_id, node.node_id))

    def _departures(self, fork: _Fork) -> dict[int, int]:
        """Ancestor fork id -> height where this fork's chain leaves it."""
        out: dict[int, int] = {}
        cur = fork
        while cur.parent is not None:
            parent = self.forks[self._rid(cur.parent)]
            out[parent.id] = cur.fork_point
            cur = parent
        return out

    def _reorg_depth(self, view: ChainView, new_fork: _Fork) -> int:
        """Blocks abandoned when a node on ``view`` adopts ``new_fork``."""
        old_fork = self.forks[view.fork_id]
        if old_fork.id == new_fork.id:
            return 0
        anc_old = self._departures(old_fork)
        anc_new = self._departures(new_fork)
        if new_fork.id in anc_old:
            branch = anc_old[new_fork.id]
        elif old_fork.id in anc_new:
            branch = anc_new[old_fork.id]
        else:
            heights = [min(anc_old[a], anc_new[a]) for a in anc_old if a in anc_new]
            branch = min(heights) if heights else view.height
        return max(0, view.height - branch)

    def _accept(self, node: SimNode, fork: _Fork, height: int, t: float) -> None:
        old = node.view
        if old.fork_id != fork.id:
            depth = self._reorg_depth(old, fork)
            if depth > 0:
                self.trace.records.append(
                    {"t": t, "kind": "reorg", "node": node.node_id, "depth": depth,
                     "from_fork": old.fork_id, "to_fork": fork.id}
                )
        apply_block(node, (fork.id, height, fork.fork_point))
        self._clock_time[node.node_id] = t
        part = self.partition
        if part is not None:
            if fork.id == part.fork.id:
                part.inside_applied = max(part.inside_applied, height)
            elif fork.id == HONEST_FORK and height > part.h0:
                part.outside_applied = max(part.outside_applied, height)

    # -- catch-up -----------------------------------------------------------

    def _arm_catchup(self, node_id: str, t: float) -> None:
        if not self._catchup_armed[node_id]:
            self._catchup_armed[node_id] = True
            self._push(t + self.params.resync_seconds_per_block, "catchup", (node_id,))

    def _on_catchup(self, t: float, node_id: str) -> None:
        self._catchup_armed[node_id] = False
        node = self.nodes[node_id]
        if not node.online:
            return
        fork = self._side_fork(node)
        view = node.view
        if view.height >= fork.tip:
            return  # nothing better available on our side yet
        self._accept(node, fork, view.height + 1, t)
        if node.view.height < fork.tip:
            self._arm_catchup(node_id, t)

    # -- churn ----------------------------------------------------------------

    def _on_churn(self, t: float, node_id: str) -> None:
        node = self.nodes[node_id]
        node.online = not node.online
        if node.online:
            fork = self._side_fork(node)
            if node.view.height < fork.tip or node.view.fork_id != fork.id:
                self._arm_catchup(node_id, t)
        rate = self.params.churn_rate / 3600.0
        self._push(t + self.rng.expovariate(rate), "churn", (node_id,))

    # -- attacks --------------------------------------------------------------

    def _on_attack_start(self, t: float, sc) -> None:
        self.trace.records.append(
            {"t": t, "kind": "attack_start", "attack": sc.kind, "label": sc.label}
        )
        if sc.kind == "spatial":
            self._start_spatial(t, sc)
        elif sc.kind == "temporal":
            self._start_temporal(t, sc)
        elif sc.kind == "logical":
            self._run_logical(t, sc)

    def _on_attack_end(self, t: float, sc) -> None:
        self.trace.records.append(
            {"t": t, "kind": "attack_end", "attack": sc.kind, "label": sc.label}
        )
        if sc.kind == "spatial":
            self._heal_spatial(t, sc)
        elif sc.kind == "temporal":
            self._end_temporal(t, sc)

    def _start_spatial(self, t: float, sc) -> None:
        if self.partition is not None:
            raise ConfigError(f"scenario {sc.label!r}: overlapping spatial windows")
        as_set = frozenset(sc.as_set)
        inside = {nid: self.nodes[nid].asn in as_set for nid in self.node_ids}
        h0 = self.forks[HONEST_FORK].tip
        fork = self._new_fork("partition", h0, HONEST_FORK)
        n_inside = sum(1 for v in inside.values() if v)
        self.partition = _Partition(
            label=sc.label,
            as_set=as_set,
            inside=inside,
            fork=fork,
            h0=h0,
            node_fraction=n_inside / len(self.node_ids),
            hash_fraction=isolated_hash_rate(self.pools, as_set, self.attribution),
            inside_applied=h0,
            outside_applied=h0,
        )

    def _heal_spatial(self, t: float, sc) -> None:
        part = self.partition
        if part is None or part.label != sc.label:
            return
        pfork = part.fork
        honest = self.forks[HONEST_FORK]
        fork_formed = part.inside_applied > part.h0 and part.outside_applied > part.h0
        inside_wins = pfork.tip > honest.tip
        if inside_wins:
            loser_applied = part.outside_applied
            honest.tip = pfork.tip
            self._alias[pfork.id] = HONEST_FORK
            for node in self.nodes.values():
                view = node.view
                if view.fork_id == pfork.id:
                    node.view = ChainView(HONEST_FORK, view.height, 0)
                elif view.fork_id == HONEST_FORK and view.height > part.h0:
                    node.view = ChainView(HONEST_FORK, pfork.tip, 0)
                    self._clock_time[node.node_id] = t
        else:
            loser_applied = part.inside_applied
            pfork.dead = True
            for node in self.nodes.values():
                if node.view.fork_id == pfork.id:
                    node.view = ChainView(HONEST_FORK, honest.tip, 0)
                    self._clock_time[node.node_id] = t
        depth = max(0, loser_applied - part.h0)
        if depth > 0:
            self.trace.records.append(
                {"t": t, "kind": "reorg", "node": None, "depth": depth,
                 "from_fork": HONEST_FORK if inside_wins else pfork.id,
                 "to_fork": HONEST_FORK, "wholesale": True}
            )
        n_inside = sum(1 for v in part.inside.values() if v)
        self.trace.records.append(
            {"t": t, "kind": "attack_outcome", "attack": "spatial", "label": sc.label,
             "as_set": sorted(part.as_set),
             "isolated_nodes": n_inside,
             "isolated_node_fraction": part.node_fraction,
             "isolated_hash_fraction": part.hash_fraction,
             "fork_formed": fork_formed,
             "reorg_depth_on_heal": depth}
        )
        self.partition = None
        for nid in self.node_ids:  # stragglers resume catching up to the winner
            node = self.nodes[nid]
            if node.online and node.view.height < self.forks[HONEST_FORK].tip:
                self._arm_catchup(nid, t)

    def _start_temporal(self, t: float, sc) -> None:
        tip = self.forks[HONEST_FORK].tip
        forks: dict[str, _Fork] = {}
        initial: dict[str, int] = {}
        for nid in self.node_ids:
            node = self.nodes[nid]
            if not node.online or node.view.fork_id != HONEST_FORK:
                continue
            bucket = lag_bucket(tip - node.view.height)
            if bucket >= sc.min_lag_bucket:
                forks[nid] = self._new_fork("counterfeit", node.view.height, HONEST_FORK)
                initial[nid] = bucket
        self.temporal = _Temporal(
            label=sc.label, share=sc.adversary_hash_share, active=True,
            forks=forks, initial_bucket=initial, subverted={},
        )
        if sc.adversary_hash_share > 0:
            rate = sc.adversary_hash_share / self.params.expected_block_interval
            for nid in forks:
                self._push(t + self.rng.expovariate(rate), "counterfeit_mined", (nid,))

    def _on_counterfeit_mined(self, t: float, victim_id: str) -> None:
        st = self.temporal
        if st is None or not st.active:
            return
        fork = st.forks.get(victim_id)
        if fork is None or fork.dead:
            return
        node = self.nodes[victim_id]
        view = node.view
        attachable = (view.fork_id == fork.id and view.height == fork.tip) or (
            view.fork_id == self._rid(fork.parent) and view.height == fork.fork_point
        )
        if not attachable:
            # the victim's chain moved on; the adversary watches its height and
            # re-anchors the private fork there (losing its unaccepted blocks)
            fork.parent = view.fork_id
            fork.fork_point = view.height
            fork.tip = view.height
        honest_tip = self.forks[HONEST_FORK].tip
        h_c = fork.tip + 1
        if node.online and h_c <= honest_tip:
            fork.tip = h_c
            lag_before = honest_tip - view.height
            apply_block(node, (fork.id, h_c, fork.fork_point))
            self._clock_time[victim_id] = t
            first = victim_id not in st.subverted
            if first:
                st.subverted[victim_id] = st.initial_bucket[victim_id]
            self.trace.records.append(
                {"t": t, "kind": "counterfeit_delivered", "node": victim_id,
                 "height": h_c, "lag_before": lag_before, "accepted": True,
                 "subverted": first}
            )
        rate = st.share / self.params.expected_block_interval
        self._push(t + self.rng.expovariate(rate), "counterfeit_mined", (victim_id,))

    def _end_temporal(self, t: float, sc) -> None:
        st = self.temporal
        if st is None or st.label != sc.label:
            return
        st.active = False
        victims_by_bucket = {label: 0 for label in BUCKET_LABELS[1:]}
        subverted_by_bucket = {label: 0 for label in BUCKET_LABELS[1:]}
        for bucket in st.initial_bucket.values():
            victims_by_bucket[BUCKET_LABELS[bucket]] += 1
        for bucket in st.subverted.values():
            subverted_by_bucket[BUCKET_LABELS[bucket]] += 1
        self.trace.records.append(
            {"t": t, "kind": "attack_outcome", "attack": "temporal", "label": sc.label,
             "victims": len(st.initial_bucket), "subverted": len(st.subverted),
             "victims_by_bucket": victims_by_bucket,
             "subverted_by_bucket": subverted_by_bucket}
        )
        for nid, fork in st.forks.items():
            fork.dead = True
            node = self.nodes[nid]
            if node.online and node.view.fork_id == fork.id:
                self._arm_catchup(nid, t)
        self.temporal = None

    def _run_logical(self, t: float, sc) -> None:
        model = sc.adoption
        adopters = []
        for nid in self.node_ids:
            node = self.nodes[nid]
            if model.kind == "fixed_share":
                p = model.p
            else:  # preferential by feature: laggard clients adopt more readily
                p = model.p_base
                if node.version != model.current_version:
                    p = min(1.0, model.p_base + model.boost)
            if self.rng.random() < p:
                adopters.append(nid)
        for nid in adopters:
            self.nodes[nid].version = sc.malicious_version
        self.compromised.extend(adopters)
        self.trace.records.append(
            {"t": t, "kind": "attack_outcome", "attack": "logical", "label": sc.label,
             "compromised_count": len(adopters),
             "compromised_fraction": len(adopters) / len(self.node_ids)}
        )

    # -- sampling -------------------------------------------------------------

    def _on_sample(self, t: float) -> None:
        online = [n for n in self.nodes.values() if n.online]
        if not online:
            return  # a sample needs at least one observable node
        tip_obs = max(n.view.height for n in online)
        hist = lag_distribution(online, tip_obs, self._counterfeit_fork_ids())
        rec = {"t": t, "kind": "sample"}
        for label, frac in zip(BUCKET_LABELS, hist.fractions):
            rec[label] = frac
        rec["counterfeit"] = hist.counterfeit_fraction
        rec["online"] = len(online)
        rec["tip"] = tip_obs
        self.trace.records.append(rec)
        if self.blockaware_cfg is not None:
            for node in online:
                clock = ba.NodeClock(
                    last_sync_height=node.view.height,
                    last_sync_time=self._clock_time[node.node_id],
                    now=t,
                )
                result = ba.check(node.view.height, clock, self.blockaware_cfg)
                if result.alert:
                    self.trace.records.append(
                        {"t": t, "kind": "blockaware_alert", "node": node.node_id,
                         "est_lag": result.estimated_lag}
                    )
        if self.export_dir is not None:
            self._export_snapshot(t, online)

    def _export_snapshot(self, t: float, online: Sequence[SimNode]) -> None:
        self.export_dir.mkdir(parents=True, exist_ok=True)
        ts = int(round(t))
        doc = {
            "timestamp": ts,
            "nodes": [
                {
                    "address": n.address or _synthetic_address(i),
                    "asn": n.asn,
                    "org": n.org,
                    "height": n.view.height,
                    "version": n.version,
                }
                for i, n in enumerate(online)
            ],
        }
        path = self.export_dir / f"snap-{ts}.json"
        path.write_text(json.dumps(doc, indent=1), encoding="utf-8")


def _synthetic_address(index: int) -> str:
    a = 0x0A000000 + index
    return f"{(a >> 24) & 255}.{(a >> 16) & 255}.{(a >> 8) & 255}.{a & 255}"


def _validate_scenarios(scenarios: Sequence, known_asns: set[int], horizon: float) -> None:
    for i, sc in enumerate(scenarios):
        where = f"scenarios[{i}]"
        kind = getattr(sc, "kind", None)
        if kind not in ("spatial", "temporal", "logical"):
            raise ConfigError(f"{where}: unknown scenario kind {kind!r}")
        if sc.start < 0:
            raise ConfigError(f"{where}.start: must be >= 0")
        duration = getattr(sc, "duration", None)
        if duration is not None:
            if duration <= 0:
                raise ConfigError(f"{where}.duration: must be > 0")
            if sc.start + duration > horizon:
                raise ConfigError(f"{where}: window extends past the horizon")
        elif sc.start > horizon:
            raise ConfigError(f"{where}.start: past the horizon")
        if kind == "spatial":
            if not sc.as_set:
                raise ConfigError(f"{where}.as_set: must be non-empty")
            unknown = sorted(set(sc.as_set) - known_asns)
            if unknown:
                raise ConfigError(f"{where}.as_set: unknown AS {unknown[0]}")
        elif kind == "temporal":
            if not 0.0 <= sc.adversary_hash_share < 1.0:
                raise ConfigError(f"{where}.adversary_hash_share: must be in [0,1)")
            if not 1 <= sc.min_lag_bucket <= 4:
                raise ConfigError(f"{where}.min_lag_bucket: must be in 1..4")


def run(
    nodes: Sequence[SimNode],
    params: SimParams,
    scenarios: Sequence = (),
    pools: Sequence[MiningPool] = POOLS_2018,
    attribution: AttributionPolicy = AttributionPolicy.VIEW_UNION,
    aliases: Mapping[str, str] | None = None,
    blockaware_cfg: ba.BlockAwareConfig | None = None,
    export_dir: str | Path | None = None,
) -> TraceLog:
    """Run one deterministic simulation and return its trace.

    Peers are wired here (ring + random extras) when the provided nodes have
    none; all randomness derives from ``params.seed``.
    """
    sim = Simulation(
        nodes, params, scenarios, pools, attribution, aliases, blockaware_cfg, export_dir
    )
    if all(not n.peers for n in sim.nodes.values()):
        wire_peers(list(sim.nodes.values()), params, sim.rng)
    return sim.run()
