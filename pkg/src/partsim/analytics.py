"""Census analytics over snapshots, series, and traces; report emission.

Network tip for a recorded sample is the highest height reported by any node
in that sample, i.e. lag is measured against the most-updated observed node.
Reports are byte-stable: fixed key order and fractions at six decimals, so
identical bundles produce identical files.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DataError, DomainError, ParameterError
from .ingest import SnapshotSeries
from .simulation import BUCKET_LABELS, TraceLog, lag_bucket
from .topology import CoverResult, NetworkSnapshot

#: Release dates of the top-5 client versions of the 2018 census, and the
#: census observation date they were lagged against.
RELEASE_DATES_2018: dict[str, dt.date] = {
    "0.16.0": dt.date(2018, 2, 26),
    "0.15.1": dt.date(2017, 11, 11),
    "0.15.0.1": dt.date(2017, 9, 19),
    "0.14.2": dt.date(2017, 6, 17),
    "0.15.0": dt.date(2017, 4, 22),
}
OBSERVATION_DATE_2018 = dt.date(2018, 4, 26)


@dataclass(frozen=True)
class VersionCensus:
    """Client versions by user share, descending; ties lexicographic."""

    entries: tuple[tuple[str, float], ...]
    distinct_count: int


def version_census(snapshot: NetworkSnapshot) -> VersionCensus:
    if not snapshot.nodes:
        raise DomainError("empty snapshot")
    counts: dict[str, int] = {}
    for n in snapshot.nodes:
        counts[n.version] = counts.get(n.version, 0) + 1
    total = len(snapshot.nodes)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    entries = tuple((v, c / total) for v, c in ordered)
    return VersionCensus(entries=entries, distinct_count=len(entries))


def version_lag_days(
    census: VersionCensus,
    release_dates: Mapping[str, dt.date],
    observation_date: dt.date,
) -> tuple[dict[str, int], tuple[str, ...]]:
    """Days between each version's release and the observation date.

    Versions without a known release date are flagged (second return value),
    not dropped. Observation predating a release is a data error.
    """
    lags: dict[str, int] = {}
    missing = []
    for version, _ in census.entries:
        release = release_dates.get(version)
        if release is None:
            missing.append(version)
            continue
        days = (observation_date - release).days
        if days < 0:
            raise DataError(
                f"version {version}: observed {observation_date} before release {release}"
            )
        lags[version] = days
    return lags, tuple(missing)


@dataclass(frozen=True)
class LagSample:
    t: float
    fractions: tuple[float, float, float, float, float]


@dataclass(frozen=True)
class LagTimeseries:
    samples: tuple[LagSample, ...]


def _snapshot_lag_fractions(snapshot: NetworkSnapshot) -> tuple[float, ...]:
    tip = max(n.height for n in snapshot.nodes)
    counts = [0, 0, 0, 0, 0]
    for n in snapshot.nodes:
        counts[lag_bucket(tip - n.height)] += 1
    total = len(snapshot.nodes)
    return tuple(c / total for c in counts)


def lag_timeseries(source: SnapshotSeries | TraceLog) -> LagTimeseries:
    """One lag-bucket sample per snapshot or per trace sample record."""
    samples: list[LagSample] = []
    if isinstance(source, TraceLog):
        for rec in source.samples():
            samples.append(
                LagSample(rec["t"], tuple(rec[label] for label in BUCKET_LABELS))
            )
    elif isinstance(source, SnapshotSeries):
        for snap in source.snapshots:
            if not snap.nodes:
                continue  # nothing observable in this sample
            samples.append(LagSample(float(snap.timestamp), _snapshot_lag_fractions(snap)))
    else:
        raise ParameterError(f"unsupported source type {type(source).__name__}")
    if not samples:
        raise DomainError("source has no usable samples")
    return LagTimeseries(tuple(samples))


@dataclass
class ReportBundle:
    """Everything the report files carry; recomputable from its sources."""

    cdf_as: tuple = ()
    cdf_org: tuple = ()
    covers: tuple[dict, ...] = ()
    lag_series: LagTimeseries | None = None
    version_census: VersionCensus | None = None
    version_lags: dict = field(default_factory=dict)
    attack_outcomes: tuple[dict, ...] = ()
    economics: tuple[dict, ...] = ()
    gaps: tuple[dict, ...] = ()


def cover_record(level: str, target: float, result: CoverResult) -> dict:
    return {
        "level": level,
        "target": target,
        "size": len(result.as_list),
        "members": list(result.as_list),
        "covered_fraction": result.covered_fraction,
    }


def _r6(x: float) -> float:
    return round(x, 6)


def bundle_to_json_doc(bundle: ReportBundle) -> dict:
    doc: dict = {"schema_version": 1}
    doc["cdf"] = {
        "as": [[k, _r6(f)] for k, f in bundle.cdf_as],
        "org": [[k, _r6(f)] for k, f in bundle.cdf_org],
    }
    doc["covers"] = [
        {
            "level": c["level"],
            "target": _r6(c["target"]),
            "size": c["size"],
            "members": c["members"],
            "covered_fraction": _r6(c["covered_fraction"]),
        }
        for c in bundle.covers
    ]
    doc["lag_series"] = [
        {"t": s.t, **{label: _r6(f) for label, f in zip(BUCKET_LABELS, s.fractions)}}
        for s in (bundle.lag_series.samples if bundle.lag_series else ())
    ]
    if bundle.version_census is not None:
        doc["version_census"] = {
            "distinct_count": bundle.version_census.distinct_count,
            "entries": [[v, _r6(f)] for v, f in bundle.version_census.entries],
        }
    else:
        doc["version_census"] = None
    doc["version_lag_days"] = dict(sorted(bundle.version_lags.items()))
    doc["attack_outcomes"] = list(bundle.attack_outcomes)
    doc["economics"] = list(bundle.economics)
    doc["gaps"] = list(bundle.gaps)
    return doc


def _lag_series_csv(bundle: ReportBundle) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t"] + list(BUCKET_LABELS))
    for s in bundle.lag_series.samples if bundle.lag_series else ():
        writer.writerow([f"{s.t:.3f}"] + [f"{f:.6f}" for f in s.fractions])
    return out.getvalue()


def _cdf_csv(series) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rank", "cumulative_fraction"])
    for k, f in series:
        writer.writerow([k, f"{f:.6f}"])
    return out.getvalue()


def _version_csv(census: VersionCensus | None) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["version", "fraction"])
    for v, f in census.entries if census else ():
        writer.writerow([v, f"{f:.6f}"])
    return out.getvalue()


def emit_report(bundle: ReportBundle, out_dir: str | Path, formats: Sequence[str]) -> list[Path]:
    """Write the bundle; returns the created paths. Byte-stable per bundle."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out}: {e}") from None
    formats = list(formats)
    for fmt in formats:
        if fmt not in ("json", "csv"):
            raise ParameterError(f"unknown report format {fmt!r}")
    written = []
    if "json" in formats:
        path = out / "report.json"
        path.write_text(json.dumps(bundle_to_json_doc(bundle), indent=1) + "\n", "utf-8")
        written.append(path)
    if "csv" in formats:
        for name, text in (
            ("lag_series.csv", _lag_series_csv(bundle)),
            ("cdf_as.csv", _cdf_csv(bundle.cdf_as)),
            ("cdf_org.csv", _cdf_csv(bundle.cdf_org)),
            ("version_census.csv", _version_csv(bundle.version_census)),
        ):
            path = out / name
            path.write_text(text, "utf-8")
            written.append(path)
    return written
