"""Deterministic fixture snapshots reproducing the 2018 census aggregates.

The census snapshot is engineered so that the smallest AS cover of 30% of
nodes has exactly 8 members, the 50% cover exactly 24, the 50% organization
cover exactly 13, and the client-version census has 288 distinct versions
with the top two at 36.28% and 27.52%. The high-lag series contains one
sample where more than 90% of nodes sit 1-4 blocks behind.
"""

from __future__ import annotations

import random
from pathlib import Path

from .ingest import serialize_snapshot
from .topology import NetworkSnapshot, NodeRecord

CENSUS_TIMESTAMP = 1_524_700_800  # 2018-04-26 00:00:00 UTC
CENSUS_TIP = 520_000

#: (asn, org, node count); org groups are sized so the 30%/50% node covers
#: and the 50% organization cover land on 8, 24 and 13 exactly.
_AS_PLAN: list[tuple[int, str, int]] = (
    [(1000 + i, f"org-big-{i}", 380) for i in range(1, 9)]
    + [(2000 + i, "org-giant" if i > 12 else f"org-mid-{(i - 1) // 3 + 1}", 123)
       for i in range(1, 17)]
    + [(3000 + i, f"org-small-{i}", 104) for i in range(1, 49)]
)

#: (version, node count); 288 distinct versions totalling 10,000 users.
_VERSION_PLAN: list[tuple[str, int]] = (
    [("0.16.0", 3628), ("0.15.1", 2752), ("0.15.0.1", 501), ("0.14.2", 467),
     ("0.15.0", 205)]
    + [(f"variant-{i:03d}", 9) for i in range(183)]
    + [(f"variant-{i:03d}", 8) for i in range(183, 283)]
)

#: (lag behind tip, node count) for the census sample's height profile.
_LAG_PLAN: list[tuple[int, int]] = [
    (0, 5000), (1, 2200), (2, 600), (3, 600), (4, 600),
    (5, 130), (6, 130), (7, 130), (8, 130), (9, 130), (10, 130),
    (15, 220),
]


def _spread(plan: list[tuple[object, int]], rng: random.Random) -> list:
    values = []
    for value, count in plan:
        values.extend([value] * count)
    rng.shuffle(values)
    return values


def make_census_snapshot() -> NetworkSnapshot:
    """The 10,000-node census fixture; fully deterministic."""
    assignments = []
    for asn, org, count in _AS_PLAN:
        assignments.extend([(asn, org)] * count)
    versions = _spread(list(_VERSION_PLAN), random.Random(2018))
    lags = _spread(list(_LAG_PLAN), random.Random(428))
    nodes = []
    for i, ((asn, org), version, lag) in enumerate(zip(assignments, versions, lags)):
        a = 0x0A000000 + i
        address = f"{(a >> 24) & 255}.{(a >> 16) & 255}.{(a >> 8) & 255}.{a & 255}"
        nodes.append(
            NodeRecord(
                node_id=address,
                address=address,
                asn=asn,
                org=org,
                height=CENSUS_TIP - lag,
                version=version,
            )
        )
    return NetworkSnapshot(timestamp=CENSUS_TIMESTAMP, nodes=tuple(nodes))


#: Per-sample (lag, count) profiles for the 200-node high-lag series; sample 2
#: is the vulnerable moment with 92% of nodes 1-4 blocks behind.
_SERIES_PROFILES: list[list[tuple[int, int]]] = [
    [(0, 120), (1, 40), (2, 20), (5, 12), (12, 8)],
    [(0, 110), (1, 50), (3, 20), (6, 12), (11, 8)],
    [(0, 8), (1, 100), (2, 52), (3, 32), (5, 8)],
    [(0, 60), (1, 80), (2, 40), (4, 12), (7, 8)],
    [(0, 100), (1, 60), (2, 24), (5, 10), (13, 6)],
    [(0, 124), (1, 40), (2, 20), (6, 10), (11, 6)],
]
SERIES_CADENCE = 600
SERIES_NODE_COUNT = 200


def make_highlag_series() -> list[NetworkSnapshot]:
    """Six 10-minute samples of a 200-node network, one vulnerable moment."""
    snapshots = []
    for k, profile in enumerate(_SERIES_PROFILES):
        assert sum(c for _, c in profile) == SERIES_NODE_COUNT
        tip = CENSUS_TIP + k
        lags = _spread(list(profile), random.Random(900 + k))
        nodes = []
        for i, lag in enumerate(lags):
            a = 0x0A800000 + i
            address = f"{(a >> 24) & 255}.{(a >> 16) & 255}.{(a >> 8) & 255}.{a & 255}"
            nodes.append(
                NodeRecord(
                    node_id=address,
                    address=address,
                    asn=5000 + (i % 20),
                    org=f"org-{5000 + (i % 20)}",
                    height=tip - lag,
                    version="0.16.0" if i % 3 else "0.15.1",
                )
            )
        snapshots.append(
            NetworkSnapshot(timestamp=CENSUS_TIMESTAMP + k * SERIES_CADENCE,
                            nodes=tuple(nodes))
        )
    return snapshots


def write_census_fixture(out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snap = make_census_snapshot()
    path = out / f"snap-{snap.timestamp}.json"
    path.write_text(serialize_snapshot(snap), "utf-8")
    return path


def write_series_fixture(out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for snap in make_highlag_series():
        path = out / f"snap-{snap.timestamp}.json"
        path.write_text(serialize_snapshot(snap), "utf-8")
        paths.append(path)
    return paths
