#!/usr/bin/env python3
"""Run the bundled demo scenario and print the attack outcomes.

Equivalent to: partsim simulate --config configs/demo_spatial.json --out out/demo
"""

import json
from pathlib import Path

from partsim.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    out = ROOT / "out" / "demo"
    code = cli_main([
        "simulate",
        "--config", str(ROOT / "configs" / "demo_spatial.json"),
        "--out", str(out),
    ])
    if code != 0:
        raise SystemExit(code)
    report = json.loads((out / "report.json").read_text())
    print("\nattack outcomes:")
    for rec in report["attack_outcomes"]:
        summary = {k: v for k, v in rec.items() if k not in ("t", "kind")}
        print(f"  {summary}")
    print("\neconomics:")
    for rec in report["economics"]:
        print(f"  {rec}")


if __name__ == "__main__":
    main()
