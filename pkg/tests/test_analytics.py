import csv
import datetime as dt
import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partsim.analytics import (
    OBSERVATION_DATE_2018,
    RELEASE_DATES_2018,
    LagTimeseries,
    ReportBundle,
    bundle_to_json_doc,
    cover_record,
    emit_report,
    lag_timeseries,
    version_census,
    version_lag_days,
)
from partsim.errors import DataError, DomainError
from partsim.fixtures import make_census_snapshot, make_highlag_series
from partsim.ingest import assemble_series, parse_snapshot
from partsim.simulation import SimParams, build_sim_nodes, run
from partsim.topology import (
    NetworkSnapshot,
    NodeRecord,
    TopologyParams,
    build_synthetic,
    min_as_cover,
)


def snapshot_with_versions(versions, heights=None):
    heights = heights or [0] * len(versions)
    nodes = tuple(
        NodeRecord(f"n{i}", f"10.0.{i // 256}.{i % 256}", 1, "org", h, v)
        for i, (v, h) in enumerate(zip(versions, heights))
    )
    return NetworkSnapshot(0, nodes)


class TestVersionCensus:
    def test_single_version(self):
        census = version_census(snapshot_with_versions(["X"] * 5))
        assert census.entries == (("X", 1.0),)
        assert census.distinct_count == 1

    def test_three_to_one(self):
        census = version_census(snapshot_with_versions(["A", "A", "A", "B"]))
        assert census.entries == (("A", 0.75), ("B", 0.25))

    def test_tie_breaks_lexicographic(self):
        census = version_census(snapshot_with_versions(["b", "a"]))
        assert census.entries == (("a", 0.5), ("b", 0.5))

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            version_census(NetworkSnapshot(0, ()))

    def test_census_fixture_headline(self):
        census = version_census(make_census_snapshot())
        assert census.entries[0] == ("0.16.0", 0.3628)
        assert census.entries[1] == ("0.15.1", 0.2752)
        assert census.distinct_count == 288

    @settings(max_examples=40, deadline=None)
    @given(versions=st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=30))
    def test_against_counter_oracle(self, versions):
        census = version_census(snapshot_with_versions(versions))
        oracle = Counter(versions)
        assert census.distinct_count == len(oracle)
        assert sum(f for _, f in census.entries) == pytest.approx(1.0, abs=1e-9)
        for version, fraction in census.entries:
            assert fraction == pytest.approx(oracle[version] / len(versions))


class TestVersionLagDays:
    def test_paper_rows(self):
        census = version_census(make_census_snapshot())
        lags, missing = version_lag_days(census, RELEASE_DATES_2018, OBSERVATION_DATE_2018)
        assert lags["0.16.0"] == 59
        assert lags["0.15.1"] == 166
        assert lags["0.15.0.1"] == 219
        assert lags["0.14.2"] == 313
        assert lags["0.15.0"] == 369
        assert len(missing) == 283  # the long tail has no release dates

    def test_same_day_zero(self):
        census = version_census(snapshot_with_versions(["x"]))
        lags, _ = version_lag_days(census, {"x": dt.date(2018, 1, 1)}, dt.date(2018, 1, 1))
        assert lags["x"] == 0

    def test_observation_before_release_rejected(self):
        census = version_census(snapshot_with_versions(["x"]))
        with pytest.raises(DataError):
            version_lag_days(census, {"x": dt.date(2018, 5, 1)}, dt.date(2018, 1, 1))


class TestLagTimeseries:
    def test_single_snapshot_all_at_tip(self):
        snap = snapshot_with_versions(["v"] * 3, heights=[9, 9, 9])
        series = assemble_series([snap], 600)
        ts = lag_timeseries(series)
        assert ts.samples[0].fractions == (1.0, 0.0, 0.0, 0.0, 0.0)

    def test_bucket_arithmetic(self):
        snap = snapshot_with_versions(["v"] * 4, heights=[100, 100, 99, 96])
        ts = lag_timeseries(assemble_series([snap], 600))
        assert ts.samples[0].fractions == (0.5, 0.25, 0.25, 0.0, 0.0)

    def test_highlag_fixture_has_vulnerable_moment(self):
        series = assemble_series(make_highlag_series(), 600)
        ts = lag_timeseries(series)
        assert any(s.fractions[1] + s.fractions[2] >= 0.9 for s in ts.samples)

    def test_empty_source_rejected(self):
        with pytest.raises(DomainError):
            lag_timeseries(assemble_series([NetworkSnapshot(0, ())], 600))

    def test_two_path_consistency(self, tmp_path):
        snap = build_synthetic(TopologyParams(100, 8, 1.0, seed=21))
        params = SimParams(horizon=14_400, seed=22, churn_rate=6.0, sample_interval=600)
        trace = run(build_sim_nodes(snap), params, export_dir=tmp_path)
        from_trace = lag_timeseries(trace)
        exported = [parse_snapshot(p.read_bytes()) for p in tmp_path.glob("snap-*.json")]
        from_series = lag_timeseries(assemble_series(exported, 600))
        assert len(from_trace.samples) == len(from_series.samples)
        for a, b in zip(from_trace.samples, from_series.samples):
            assert a.t == b.t
            assert a.fractions == pytest.approx(b.fractions, abs=1e-12)


class TestEmitReport:
    def _bundle(self):
        snap = make_census_snapshot()
        from partsim.topology import as_node_cdf, count_by

        series = assemble_series([snap], 600)
        census = version_census(snap)
        return ReportBundle(
            cdf_as=as_node_cdf(snap, "asn"),
            cdf_org=as_node_cdf(snap, "org"),
            covers=(cover_record("as", 0.3, min_as_cover(count_by(snap, "asn"), 0.3)),),
            lag_series=lag_timeseries(series),
            version_census=census,
            version_lags=version_lag_days(census, RELEASE_DATES_2018, OBSERVATION_DATE_2018)[0],
        )

    def test_byte_identical_across_emissions(self, tmp_path):
        bundle = self._bundle()
        a, b = tmp_path / "a", tmp_path / "b"
        emit_report(bundle, a, ["json", "csv"])
        emit_report(bundle, b, ["json", "csv"])
        for path_a in sorted(a.iterdir()):
            path_b = b / path_a.name
            assert path_a.read_bytes() == path_b.read_bytes()

    def test_empty_outcomes_still_emitted(self, tmp_path):
        bundle = ReportBundle()
        paths = emit_report(bundle, tmp_path, ["json", "csv"])
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["attack_outcomes"] == []
        assert (tmp_path / "lag_series.csv").read_text().startswith("t,b0,b1,b2,b3,b4")

    def test_lag_csv_roundtrip(self, tmp_path):
        bundle = self._bundle()
        emit_report(bundle, tmp_path, ["csv"])
        with open(tmp_path / "lag_series.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(bundle.lag_series.samples)
        for row, sample in zip(rows, bundle.lag_series.samples):
            assert float(row["t"]) == pytest.approx(sample.t)
            for i, label in enumerate(("b0", "b1", "b2", "b3", "b4")):
                assert float(row[label]) == pytest.approx(sample.fractions[i], abs=1e-6)

    def test_emitted_fractions_in_range(self, tmp_path):
        doc = bundle_to_json_doc(self._bundle())
        for _, f in doc["cdf"]["as"]:
            assert 0.0 <= f <= 1.0
        for sample in doc["lag_series"]:
            total = sum(sample[k] for k in ("b0", "b1", "b2", "b3", "b4"))
            assert total == pytest.approx(1.0, abs=1e-5)  # six-decimal rounding
