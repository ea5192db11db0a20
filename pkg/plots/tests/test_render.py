"""Data-layer tests for the report renderer.

Reports are produced by driving the partsim CLI (the renderer's only
interface to the simulator is the report files it emits)."""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from partsim_plots.render import (
    BUCKET_COLORS,
    PlotSpec,
    ReportSchemaError,
    main,
    render,
)

ROOT = Path(__file__).resolve().parent.parent.parent
PARTSIM = shutil.which("partsim")

pytestmark = pytest.mark.skipif(PARTSIM is None, reason="partsim CLI not installed")


def run_partsim(*args):
    proc = subprocess.run([PARTSIM, *args], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def census_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("census")
    run_partsim("census", str(ROOT / "data" / "census"), "--out", str(out))
    return out / "report.json"


@pytest.fixture(scope="module")
def calibrated_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    run_partsim(
        "simulate", "--config", str(ROOT / "configs" / "calibrated.json"),
        "--out", str(out),
    )
    return out / "report.json"


@pytest.fixture(scope="module")
def demo_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    run_partsim(
        "simulate", "--config", str(ROOT / "configs" / "demo_spatial.json"),
        "--out", str(out),
    )
    return out / "report.json"


class TestLagStack:
    def test_calibrated_trace_data_fidelity(self, calibrated_report, tmp_path):
        doc = json.loads(calibrated_report.read_text())
        result = render(PlotSpec(calibrated_report, "lag_stack", tmp_path / "lag.png"))
        assert (tmp_path / "lag.png").stat().st_size > 0
        rows = doc["lag_series"]
        assert len(result.series["t"]) == len(rows)
        for i, row in enumerate(rows):
            assert result.series["t"][i] == pytest.approx(row["t"], abs=1e-9)
            for label in ("b0", "b1", "b2", "b3", "b4"):
                assert result.series[label][i] == pytest.approx(row[label], abs=1e-9)

    def test_single_sample_full_green_band(self, tmp_path):
        report = tmp_path / "report.json"
        report.write_text(json.dumps({
            "schema_version": 1,
            "cdf": {"as": [[1, 1.0]], "org": []},
            "lag_series": [{"t": 0.0, "b0": 1.0, "b1": 0.0, "b2": 0.0,
                            "b3": 0.0, "b4": 0.0}],
            "attack_outcomes": [],
        }))
        spec = PlotSpec(report, "lag_stack", tmp_path / "one.png")
        result = render(spec)
        assert result.series["b0"] == [1.0]
        assert all(result.series[label] == [0.0] for label in ("b1", "b2", "b3", "b4"))
        assert spec.colors["b0"] == BUCKET_COLORS["b0"] == "#2ca02c"

    def test_stack_order_bottom_up(self, calibrated_report, tmp_path):
        result = render(PlotSpec(calibrated_report, "lag_stack", tmp_path / "lag.png"))
        assert list(result.series)[0] == "t"
        assert [k for k in result.series if k != "t"] == ["b0", "b1", "b2", "b3", "b4"]


class TestCdf:
    def test_census_curve_anchor(self, census_report, tmp_path):
        result = render(PlotSpec(census_report, "cdf", tmp_path / "cdf.png"))
        as_curve = dict(zip(result.series["as"]["rank"], result.series["as"]["fraction"]))
        assert as_curve[8] >= 0.30
        assert as_curve[24] >= 0.50
        assert result.series["as"]["rank"] == sorted(result.series["as"]["rank"])

    def test_org_curve_present(self, census_report, tmp_path):
        result = render(PlotSpec(census_report, "cdf", tmp_path / "cdf.png"))
        org = dict(zip(result.series["org"]["rank"], result.series["org"]["fraction"]))
        assert org[13] >= 0.50


class TestAttackSummary:
    def test_demo_outcomes(self, demo_report, tmp_path):
        result = render(PlotSpec(demo_report, "attack_summary", tmp_path / "a.png"))
        by_label = dict(zip(result.series["label"], result.series["fraction"]))
        assert by_label["table-hijack"] == pytest.approx(0.657, abs=1e-9)
        assert 0.0 <= by_label["trojan-client"] <= 1.0


class TestDeterminismAndErrors:
    def test_two_renders_identical_dims_and_values(self, census_report, tmp_path):
        a = render(PlotSpec(census_report, "cdf", tmp_path / "a.png"))
        b = render(PlotSpec(census_report, "cdf", tmp_path / "b.png"))
        assert (a.width_px, a.height_px) == (b.width_px, b.height_px)
        assert a.series == b.series

    def test_rendering_is_read_only(self, census_report, tmp_path):
        before = census_report.read_bytes()
        render(PlotSpec(census_report, "cdf", tmp_path / "c.png"))
        assert census_report.read_bytes() == before

    def test_malformed_report_exits_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["--input", str(bad), "--figure", "lag_stack",
                     "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_schema_mismatch_names_field(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        report.write_text(json.dumps({
            "schema_version": 1,
            "lag_series": [{"t": 0.0, "b0": 1.0}],  # missing b1..b4
        }))
        code = main(["--input", str(report), "--figure", "lag_stack",
                     "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "b1" in capsys.readouterr().err

    def test_cli_happy_path(self, census_report, tmp_path, capsys):
        code = main(["--input", str(census_report), "--figure", "cdf",
                     "--out", str(tmp_path / "ok.png")])
        assert code == 0
        assert (tmp_path / "ok.png").exists()


def test_criterion_11_secondary_plot_fidelity(calibrated_report, census_report, tmp_path):
    doc = json.loads(calibrated_report.read_text())
    lag = render(PlotSpec(calibrated_report, "lag_stack", tmp_path / "lag.png"))
    fidelity = all(
        abs(lag.series[label][i] - row[label]) <= 1e-9
        for i, row in enumerate(doc["lag_series"])
        for label in ("b0", "b1", "b2", "b3", "b4")
    )
    cdf = render(PlotSpec(census_report, "cdf", tmp_path / "cdf.png"))
    as_curve = dict(zip(cdf.series["as"]["rank"], cdf.series["as"]["fraction"]))
    anchor = as_curve[8] >= 0.30
    ok = fidelity and anchor
    print(f"[C11 plot-data-fidelity] {'PASS' if ok else 'FAIL'} "
          f"lag-series-match={fidelity} cdf(8)={as_curve[8]:.4f}")
    assert ok
