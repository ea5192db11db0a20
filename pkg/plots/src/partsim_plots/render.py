"""Render figures from partsim report files.

Reads the published report.json schema and draws one of three figures:

- ``lag_stack``: stacked area chart of the lag-bucket fractions over time,
  up-to-date band at the bottom in green, deeper lag bands above it in
  yellow, purple, blue and magenta.
- ``cdf``: node-concentration curves over AS rank (and organization rank
  when present).
- ``attack_summary``: one bar per attack outcome with its headline fraction.

Rendering is read-only over the report. Every figure returns the exact data
series it plotted so tests compare values, not pixels.

Usage: render --input report.json --figure lag_stack --out fig.png
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

BUCKET_LABELS = ("b0", "b1", "b2", "b3", "b4")

#: Band colors, bottom to top: up to date, 1 behind, 2-4, 5-10, >= 11.
BUCKET_COLORS = {
    "b0": "#2ca02c",  # green
    "b1": "#ffd92f",  # yellow
    "b2": "#9467bd",  # purple
    "b3": "#1f77b4",  # blue
    "b4": "#e377c2",  # magenta
}

BUCKET_NAMES = {
    "b0": "up to date",
    "b1": "1 behind",
    "b2": "2-4 behind",
    "b3": "5-10 behind",
    "b4": ">=11 behind",
}

FIGURES = ("cdf", "lag_stack", "attack_summary")


class ReportSchemaError(Exception):
    """The report does not match the published schema; names the field."""


@dataclass(frozen=True)
class PlotSpec:
    input_report: Path
    figure: str
    output: Path
    colors: dict = field(default_factory=lambda: dict(BUCKET_COLORS))
    dpi: int = 120

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ReportSchemaError(f"figure: unknown figure {self.figure!r}")


@dataclass(frozen=True)
class RenderResult:
    """Where the image went and exactly what was plotted."""

    output: Path
    width_px: int
    height_px: int
    series: dict


def load_report(path: Path) -> dict:
    try:
        text = path.read_text("utf-8")
    except OSError as e:
        raise ReportSchemaError(f"input_report: cannot read {path}: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ReportSchemaError(
            f"input_report: invalid JSON at line {e.lineno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ReportSchemaError("top level: expected a JSON object")
    if doc.get("schema_version") != 1:
        raise ReportSchemaError("schema_version: expected 1")
    return doc


def _lag_series(doc: dict) -> dict:
    rows = doc.get("lag_series")
    if not isinstance(rows, list) or not rows:
        raise ReportSchemaError("lag_series: missing or empty")
    series = {"t": []}
    for label in BUCKET_LABELS:
        series[label] = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or "t" not in row:
            raise ReportSchemaError(f"lag_series[{i}].t: missing")
        series["t"].append(float(row["t"]))
        for label in BUCKET_LABELS:
            if label not in row:
                raise ReportSchemaError(f"lag_series[{i}].{label}: missing")
            series[label].append(float(row[label]))
    return series


def _cdf_series(doc: dict) -> dict:
    cdf = doc.get("cdf")
    if not isinstance(cdf, dict) or not isinstance(cdf.get("as"), list) or not cdf["as"]:
        raise ReportSchemaError("cdf.as: missing or empty")
    out = {}
    for level in ("as", "org"):
        points = cdf.get(level) or []
        ranks, fractions = [], []
        for i, point in enumerate(points):
            if not isinstance(point, list) or len(point) != 2:
                raise ReportSchemaError(f"cdf.{level}[{i}]: expected [rank, fraction]")
            ranks.append(int(point[0]))
            fractions.append(float(point[1]))
        out[level] = {"rank": ranks, "fraction": fractions}
    return out


def _outcome_series(doc: dict) -> dict:
    rows = doc.get("attack_outcomes")
    if not isinstance(rows, list):
        raise ReportSchemaError("attack_outcomes: missing")
    labels, values, kinds = [], [], []
    for i, rec in enumerate(rows):
        kind = rec.get("attack")
        if kind == "spatial":
            value = rec.get("isolated_hash_fraction")
        elif kind == "temporal":
            victims = rec.get("victims") or 0
            value = (rec.get("subverted", 0) / victims) if victims else 0.0
        elif kind == "logical":
            value = rec.get("compromised_fraction")
        else:
            raise ReportSchemaError(f"attack_outcomes[{i}].attack: unknown kind {kind!r}")
        if value is None:
            raise ReportSchemaError(f"attack_outcomes[{i}]: missing outcome fraction")
        labels.append(rec.get("label", f"{kind}-{i}"))
        kinds.append(kind)
        values.append(float(value))
    return {"label": labels, "kind": kinds, "fraction": values}


def render(spec: PlotSpec) -> RenderResult:
    """Draw the requested figure and return the plotted data series."""
    doc = load_report(spec.input_report)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    try:
        if spec.figure == "lag_stack":
            series = _lag_series(doc)
            ax.stackplot(
                series["t"],
                [series[label] for label in BUCKET_LABELS],
                colors=[spec.colors[label] for label in BUCKET_LABELS],
                labels=[BUCKET_NAMES[label] for label in BUCKET_LABELS],
            )
            ax.set_xlabel("time (s)")
            ax.set_ylabel("fraction of nodes")
            ax.set_ylim(0.0, 1.0)
            ax.legend(loc="lower left", fontsize=7)
            ax.set_title("consensus lag over time")
        elif spec.figure == "cdf":
            series = _cdf_series(doc)
            ax.plot(series["as"]["rank"], series["as"]["fraction"], label="ASes")
            if series["org"]["rank"]:
                ax.plot(series["org"]["rank"], series["org"]["fraction"],
                        linestyle="--", label="organizations")
            ax.set_xscale("log")
            ax.set_xlabel("rank")
            ax.set_ylabel("cumulative fraction of nodes")
            ax.set_ylim(0.0, 1.05)
            ax.legend(loc="lower right", fontsize=8)
            ax.set_title("node concentration")
        else:
            series = _outcome_series(doc)
            positions = range(len(series["label"]))
            palette = {"spatial": "#d62728", "temporal": "#ff7f0e", "logical": "#8c564b"}
            ax.bar(positions, series["fraction"],
                   color=[palette[k] for k in series["kind"]])
            ax.set_xticks(list(positions))
            ax.set_xticklabels(series["label"], rotation=20, ha="right", fontsize=8)
            ax.set_ylabel("outcome fraction")
            ax.set_title("attack outcomes")
        fig.tight_layout()
        fig.savefig(spec.output, dpi=spec.dpi)
        width = int(round(fig.get_figwidth() * spec.dpi))
        height = int(round(fig.get_figheight() * spec.dpi))
    finally:
        plt.close(fig)
    return RenderResult(spec.output, width, height, series)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render figures from partsim reports"
    )
    parser.add_argument("--input", required=True)
    parser.add_argument("--figure", required=True, choices=FIGURES)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(Path(args.input), args.figure, Path(args.out))
        result = render(spec)
    except ReportSchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {result.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
