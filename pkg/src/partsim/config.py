"""Run configuration: a versioned JSON document driving reproducible runs.

Validation errors name the offending field path so the CLI can exit with an
actionable message. Exactly one input source (a snapshot directory or
synthetic topology parameters) must be present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .adversary import (
    EconomicParams,
    FixedShare,
    LogicalScenario,
    PreferentialByFeature,
    SpatialScenario,
    TemporalScenario,
)
from .blockaware import BlockAwareConfig, Estimator
from .errors import ConfigError, ParameterError
from .simulation import SimParams
from .topology import AttributionPolicy, MiningPool, POOLS_2018, TopologyParams

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    snapshot_dir: str | None
    synthetic: TopologyParams | None
    sim: SimParams
    pools: tuple[MiningPool, ...] = POOLS_2018
    attribution_policy: AttributionPolicy = AttributionPolicy.VIEW_UNION
    scenarios: tuple = ()
    blockaware: BlockAwareConfig | None = None
    economics: dict | None = None  # EconomicParams built once topology size is known
    export_snapshots: bool = False
    report_formats: tuple[str, ...] = ("json", "csv")
    raw: dict = field(default_factory=dict)

    def economic_params(self, topology_size: int) -> EconomicParams | None:
        if self.economics is None:
            return None
        ed = dict(self.economics)
        if not ed.get("node_count"):
            ed["node_count"] = topology_size
        return EconomicParams(**ed)


_SENTINEL = object()


def _get(doc: dict, path: str, types, default=_SENTINEL):
    node = doc
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is not _SENTINEL:
                return default
            raise ConfigError(f"{path}: missing required field")
        node = node[part]
    if isinstance(node, bool) or not isinstance(node, types):
        raise ConfigError(f"{path}: expected {getattr(types, '__name__', types)}")
    return node


def _parse_scenario(i: int, doc: dict):
    where = f"scenarios.{i}"
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _get(doc, "kind", str)
    label = doc.get("label", f"{kind}-{i}")
    start = float(_get(doc, "start", (int, float)))
    try:
        if kind == "spatial":
            as_set = _get(doc, "as_set", list)
            if not all(isinstance(a, int) for a in as_set):
                raise ConfigError(f"{where}.as_set: expected a list of integers")
            return SpatialScenario(label, tuple(as_set), start,
                                   float(_get(doc, "duration", (int, float))))
        if kind == "temporal":
            return TemporalScenario(
                label,
                _get(doc, "min_lag_bucket", int),
                float(_get(doc, "adversary_hash_share", (int, float))),
                start,
                float(_get(doc, "duration", (int, float))),
            )
        if kind == "logical":
            adoption_doc = _get(doc, "adoption", dict)
            model = _get(adoption_doc, "model", str)
            if model == "fixed_share":
                adoption = FixedShare(float(_get(adoption_doc, "p", (int, float))))
            elif model == "preferential":
                adoption = PreferentialByFeature(
                    float(_get(adoption_doc, "p_base", (int, float))),
                    float(_get(adoption_doc, "boost", (int, float))),
                    _get(adoption_doc, "current_version", str),
                )
            else:
                raise ConfigError(f"{where}.adoption.model: unknown model {model!r}")
            return LogicalScenario(label, _get(doc, "malicious_version", str),
                                   adoption, start)
    except ConfigError:
        raise
    except ParameterError as e:
        raise ConfigError(f"{where}: {e}") from None
    raise ConfigError(f"{where}.kind: unknown scenario kind {kind!r}")


def parse_run_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level: expected a JSON object")
    version = _get(doc, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: unsupported version {version} (this build reads {SCHEMA_VERSION})"
        )
    input_doc = _get(doc, "input", dict)
    snapshot_dir = input_doc.get("snapshot_dir")
    synthetic_doc = input_doc.get("synthetic")
    if (snapshot_dir is None) == (synthetic_doc is None):
        raise ConfigError("input: exactly one of snapshot_dir / synthetic must be set")
    synthetic = None
    if synthetic_doc is not None:
        try:
            synthetic = TopologyParams(
                node_count=_get(synthetic_doc, "node_count", int),
                as_count=_get(synthetic_doc, "as_count", int),
                concentration_exponent=float(
                    _get(synthetic_doc, "concentration_exponent", (int, float), 1.0)
                ),
                seed=_get(synthetic_doc, "seed", int, 0),
            )
        except ParameterError as e:
            raise ConfigError(f"input.synthetic: {e}") from None
    elif not isinstance(snapshot_dir, str):
        raise ConfigError("input.snapshot_dir: expected a string path")

    sim_doc = _get(doc, "sim", dict, {})
    sim_kwargs = {}
    for name, types in (
        ("expected_block_interval", (int, float)),
        ("delay_fast", (int, float)),
        ("delay_slow", (int, float)),
        ("churn_rate", (int, float)),
        ("horizon", (int, float)),
        ("seed", int),
        ("sample_interval", (int, float)),
        ("resync_seconds_per_block", (int, float)),
        ("outdegree", int),
        ("slow_fraction", (int, float)),
        ("gossip_fetch_limit", int),
    ):
        if name in sim_doc:
            value = _get(sim_doc, name, types)
            if name in ("seed", "outdegree", "gossip_fetch_limit"):
                sim_kwargs[name] = value
            else:
                sim_kwargs[name] = float(value)
    try:
        sim = SimParams(**sim_kwargs)
    except ParameterError as e:
        raise ConfigError(f"sim: {e}") from None

    pools = POOLS_2018
    if "pools" in doc:
        pool_docs = _get(doc, "pools", list)
        parsed = []
        for j, pd in enumerate(pool_docs):
            where = f"pools.{j}"
            if not isinstance(pd, dict):
                raise ConfigError(f"{where}: expected an object")
            locations = _get(pd, "locations", list)
            locs = []
            for loc in locations:
                if (not isinstance(loc, list)) or len(loc) != 2 or not isinstance(loc[0], int):
                    raise ConfigError(f"{where}.locations: expected [asn, org] pairs")
                locs.append((loc[0], str(loc[1])))
            try:
                parsed.append(
                    MiningPool(_get(pd, "name", str),
                               float(_get(pd, "hash_share", (int, float))),
                               tuple(locs))
                )
            except ParameterError as e:
                raise ConfigError(f"{where}: {e}") from None
        pools = tuple(parsed)

    policy_name = _get(doc, "attribution_policy", str, AttributionPolicy.VIEW_UNION.value)
    try:
        policy = AttributionPolicy(policy_name)
    except ValueError:
        raise ConfigError(f"attribution_policy: unknown policy {policy_name!r}") from None

    scenarios = tuple(
        _parse_scenario(i, sd) for i, sd in enumerate(_get(doc, "scenarios", list, []))
    )

    blockaware = None
    if doc.get("blockaware") is not None:
        bd = _get(doc, "blockaware", dict)
        try:
            blockaware = BlockAwareConfig(
                expected_block_interval=float(
                    _get(bd, "expected_block_interval", (int, float),
                         sim.expected_block_interval)
                ),
                alert_threshold=_get(bd, "alert_threshold", int, 2),
                estimator=Estimator(_get(bd, "estimator", str, "floor")),
            )
        except ValueError:
            raise ConfigError("blockaware.estimator: expected 'floor' or 'round'") from None
        except ParameterError as e:
            raise ConfigError(f"blockaware: {e}") from None

    economics = None
    if doc.get("economics") is not None:
        ed = _get(doc, "economics", dict)
        economics = {
            "market_cap": float(_get(ed, "market_cap", (int, float))),
            "node_count": _get(ed, "node_count", int, 0),
            "hijack_cost_per_as": float(_get(ed, "hijack_cost_per_as", (int, float), 0.0)),
            "temporal_cost": float(_get(ed, "temporal_cost", (int, float), 0.0)),
            "logical_cost": float(_get(ed, "logical_cost", (int, float), 0.0)),
        }

    out_doc = _get(doc, "outputs", dict, {})
    formats = tuple(_get(out_doc, "formats", list, ["json", "csv"]))
    for fmt in formats:
        if fmt not in ("json", "csv"):
            raise ConfigError(f"outputs.formats: unknown format {fmt!r}")

    return RunConfig(
        snapshot_dir=snapshot_dir,
        synthetic=synthetic,
        sim=sim,
        pools=pools,
        attribution_policy=policy,
        scenarios=scenarios,
        blockaware=blockaware,
        economics=economics,
        export_snapshots=bool(doc.get("export_snapshots", False)),
        report_formats=formats,
        raw=doc,
    )


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path}: invalid JSON at line {e.lineno}: {e.msg}") from None
    return parse_run_config(doc)
