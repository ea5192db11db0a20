"""Command-line entry point: census replay, simulation runs, attack sweeps,
and countermeasure evaluation.

Exit codes: 0 success, 1 runtime failure, 2 configuration/input problem.
Successful runs print to stdout only.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import adversary, analytics, blockaware, ingest, simulation, topology
from .config import RunConfig, load_run_config, parse_run_config
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    ParameterError,
    ParseError,
    PartsimError,
    SchemaError,
)

_CONFIG_ERRORS = (ConfigError, ParseError, SchemaError, ParameterError)


def _load_snapshot_dir(path: Path) -> list[topology.NetworkSnapshot]:
    if not path.is_dir():
        raise ConfigError(f"snapshot directory {path} does not exist")
    files = sorted(path.glob("snap-*.json"))
    if not files:
        raise ConfigError(f"snapshot directory {path} has no snap-*.json files")
    snapshots = []
    problems = []
    for f in files:
        try:
            snapshots.append(ingest.parse_snapshot(f.read_bytes()))
        except (ParseError, SchemaError) as e:
            problems.append(f"{f.name}: {e}")
    if not snapshots:
        detail = "; ".join(problems)
        raise ConfigError(f"no valid snapshots in {path}: {detail}")
    if problems:
        print(f"warning: skipped {len(problems)} invalid snapshot file(s)", file=sys.stderr)
    return snapshots


def build_census_bundle(
    snapshot_dir: Path,
    prefix_table: ingest.PrefixTable | None = None,
    aliases: dict | None = None,
    targets: tuple[float, ...] = (0.30, 0.50),
    cadence: int = 600,
) -> analytics.ReportBundle:
    """Replay recorded snapshots into the full census report bundle."""
    snapshots = _load_snapshot_dir(snapshot_dir)
    if prefix_table is not None:
        snapshots = [ingest.resolve_snapshot(s, prefix_table) for s in snapshots]
    series = ingest.assemble_series(snapshots, cadence)
    latest = series.snapshots[-1]
    as_counts = topology.count_by(latest, "asn")
    org_counts = topology.count_by(latest, "org", aliases)
    covers = []
    for target in targets:
        covers.append(analytics.cover_record(
            "as", target, topology.min_as_cover(as_counts, target)))
        covers.append(analytics.cover_record(
            "org", target, topology.min_as_cover(org_counts, target)))
    return analytics.ReportBundle(
        cdf_as=topology.as_node_cdf(latest, "asn"),
        cdf_org=topology.as_node_cdf(latest, "org", aliases),
        covers=tuple(covers),
        lag_series=analytics.lag_timeseries(series),
        version_census=analytics.version_census(latest),
        version_lags=analytics.version_lag_days(
            analytics.version_census(latest),
            analytics.RELEASE_DATES_2018,
            analytics.OBSERVATION_DATE_2018,
        )[0],
        gaps=tuple(
            {"after_timestamp": g.after_timestamp, "gap_seconds": g.gap_seconds,
             "missing_samples": g.missing_samples}
            for g in series.gaps
        ),
    )


def _cmd_census(args) -> int:
    aliases = topology.default_org_aliases()
    if args.aliases:
        aliases = topology.load_org_aliases(Path(args.aliases).read_text("utf-8"))
    prefix_table = None
    if args.prefix_table:
        prefix_table = ingest.load_prefix_table(Path(args.prefix_table).read_text("utf-8"))
    targets = tuple(float(t) for t in args.cover_targets.split(","))
    bundle = build_census_bundle(
        Path(args.snapshot_dir), prefix_table, aliases, targets, args.cadence
    )
    written = analytics.emit_report(bundle, args.out, args.format.split(","))
    for path in written:
        print(f"wrote {path}")
    return 0


def run_configured(cfg: RunConfig, out_dir: Path | None) -> tuple[simulation.TraceLog, analytics.ReportBundle]:
    """Execute one configured simulation and assemble its report bundle."""
    aliases = topology.default_org_aliases()
    if cfg.snapshot_dir is not None:
        snapshots = _load_snapshot_dir(Path(cfg.snapshot_dir))
        source = max(snapshots, key=lambda s: s.timestamp)
    else:
        source = topology.build_synthetic(cfg.synthetic)
    nodes = simulation.build_sim_nodes(source)
    export_dir = None
    if cfg.export_snapshots and out_dir is not None:
        export_dir = out_dir / "snapshots"
    trace = simulation.run(
        nodes,
        cfg.sim,
        cfg.scenarios,
        pools=cfg.pools,
        attribution=cfg.attribution_policy,
        aliases=aliases,
        blockaware_cfg=cfg.blockaware,
        export_dir=export_dir,
    )
    outcomes = tuple(trace.outcomes())
    econ = cfg.economic_params(len(nodes))
    economics = []
    if econ is not None:
        for rec in outcomes:
            affected = {
                "spatial": rec.get("isolated_nodes", 0),
                "temporal": rec.get("subverted", 0),
                "logical": rec.get("compromised_count", 0),
            }[rec["attack"]]
            cost = adversary.cost_of(econ, rec)
            var = adversary.value_at_risk(econ, affected, cost)
            economics.append({
                "label": rec["label"],
                "attack": rec["attack"],
                "affected": affected,
                "per_node_value": var.per_node_value,
                "value_at_risk": var.value_at_risk,
                "cost": var.cost,
                "benefit_ratio": var.benefit_ratio,
            })
    bundle = analytics.ReportBundle(
        cdf_as=topology.as_node_cdf(source, "asn"),
        cdf_org=topology.as_node_cdf(source, "org", aliases),
        lag_series=analytics.lag_timeseries(trace),
        version_census=analytics.version_census(source),
        attack_outcomes=outcomes,
        economics=tuple(economics),
    )
    return trace, bundle


def _cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    if args.seed_override is not None:
        cfg.sim = replace(cfg.sim, seed=args.seed_override)
    if args.format:
        cfg.report_formats = tuple(args.format.split(","))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace, bundle = run_configured(cfg, out)
    trace_path = out / "trace.jsonl"
    trace_path.write_text(trace.to_jsonl(), "utf-8")
    written = [trace_path] + analytics.emit_report(bundle, out, cfg.report_formats)
    for path in written:
        print(f"wrote {path}")
    return 0


def _set_by_path(doc: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = doc
    for part in parts[:-1]:
        node = node[int(part)] if isinstance(node, list) else node[part]
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def _sweep_task(task: tuple[dict, str, object, int, int]) -> list[dict]:
    base_doc, parameter, value, rep, seed = task
    doc = json.loads(json.dumps(base_doc))
    _set_by_path(doc, parameter, value)
    _set_by_path(doc, "sim.seed", seed)
    cfg = parse_run_config(doc)
    trace, _ = run_configured(cfg, None)
    rows = []
    for rec in trace.outcomes():
        row = {"parameter": parameter, "value": value, "repetition": rep, "seed": seed}
        row.update(rec)
        rows.append(row)
    return rows


def _cmd_attack_sweep(args) -> int:
    path = Path(args.config)
    try:
        doc = json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read sweep config {path}: {e}") from None
    base = doc.get("base")
    sweep = doc.get("sweep")
    if not isinstance(base, dict) or not isinstance(sweep, dict):
        raise ConfigError("sweep config needs 'base' and 'sweep' objects")
    parameter = sweep.get("parameter")
    values = sweep.get("values")
    reps = sweep.get("repetitions", 1)
    if not isinstance(parameter, str) or not isinstance(values, list) or not values:
        raise ConfigError("sweep: expected 'parameter' (string) and non-empty 'values'")
    if not isinstance(reps, int) or reps < 1:
        raise ConfigError("sweep.repetitions: expected a positive integer")
    parse_run_config(json.loads(json.dumps(base)))  # validate before fan-out
    base_seed = base.get("sim", {}).get("seed", 0)
    tasks = []
    for vi, value in enumerate(values):
        for rep in range(reps):
            seed = base_seed + 9973 * vi + rep
            tasks.append((base, parameter, value, rep, seed))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    rows = [row for rows in results for row in rows]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "sweep.json"
    json_path.write_text(json.dumps({"rows": rows}, indent=1, default=str) + "\n", "utf-8")
    print(f"wrote {json_path}")
    return 0


def _cmd_blockaware_eval(args) -> int:
    thresholds = [int(t) for t in args.thresholds.split(",")]
    estimators = [blockaware.Estimator(e) for e in args.estimators.split(",")]
    rows = []
    for estimator in estimators:
        for threshold in thresholds:
            cfg = blockaware.BlockAwareConfig(
                expected_block_interval=args.interval,
                alert_threshold=threshold,
                estimator=estimator,
            )
            rate = blockaware.false_positive_rate(cfg, args.horizon, args.trials, args.seed)
            rows.append({
                "estimator": estimator.value,
                "alert_threshold": threshold,
                "horizon": args.horizon,
                "trials": args.trials,
                "false_positive_rate": rate,
            })
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "blockaware_eval.json"
    path.write_text(json.dumps({"rows": rows}, indent=1) + "\n", "utf-8")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partsim",
        description="Partitioning-attack simulator and census analytics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    census = sub.add_parser("census", help="replay recorded snapshots into reports")
    census.add_argument("snapshot_dir")
    census.add_argument("--out", required=True)
    census.add_argument("--prefix-table", default=None)
    census.add_argument("--aliases", default=None)
    census.add_argument("--cover-targets", default="0.3,0.5")
    census.add_argument("--cadence", type=int, default=600)
    census.add_argument("--format", default="json,csv")
    census.set_defaults(func=_cmd_census)

    sim = sub.add_parser("simulate", help="run one configured simulation")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed-override", type=int, default=None)
    sim.add_argument("--format", default=None)
    sim.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("attack-sweep", help="grid over one scenario parameter")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.set_defaults(func=_cmd_attack_sweep)

    bae = sub.add_parser("blockaware-eval", help="false-positive study")
    bae.add_argument("--out", required=True)
    bae.add_argument("--interval", type=float, default=600.0)
    bae.add_argument("--horizon", type=float, default=600.0)
    bae.add_argument("--trials", type=int, default=100_000)
    bae.add_argument("--thresholds", default="1,2,3")
    bae.add_argument("--estimators", default="floor")
    bae.add_argument("--seed", type=int, default=0)
    bae.set_defaults(func=_cmd_blockaware_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (DomainError, DataError, PartsimError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
