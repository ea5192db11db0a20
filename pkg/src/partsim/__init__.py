"""Partitioning-attack simulator and census analytics for a Bitcoin-like
peer-to-peer network."""

from .topology import (
    AttributionPolicy,
    MiningPool,
    NetworkSnapshot,
    NodeRecord,
    POOLS_2018,
    TopologyParams,
    as_node_cdf,
    attribute_hash_rate,
    build_synthetic,
    isolated_hash_rate,
    min_as_cover,
)
from .ingest import (
    PrefixTable,
    SnapshotSeries,
    assemble_series,
    load_prefix_table,
    parse_snapshot,
    resolve_asn,
    serialize_snapshot,
)
from .simulation import (
    ChainView,
    LagHistogram,
    SimNode,
    SimParams,
    TraceLog,
    apply_block,
    build_sim_nodes,
    lag_bucket,
    lag_distribution,
    lag_of,
    mine_next,
    run,
)
from .adversary import (
    EconomicParams,
    FixedShare,
    LogicalScenario,
    PreferentialByFeature,
    SpatialScenario,
    TemporalScenario,
    logical_release,
    spatial_hijack,
    temporal_feed,
    value_at_risk,
)
from .blockaware import BlockAwareConfig, Estimator, NodeClock, check, expected_height, false_positive_rate
from .analytics import (
    LagTimeseries,
    ReportBundle,
    VersionCensus,
    emit_report,
    lag_timeseries,
    version_census,
    version_lag_days,
)

__version__ = "0.1.0"
