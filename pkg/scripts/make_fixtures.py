#!/usr/bin/env python3
"""Regenerate the bundled fixture data under data/.

Writes the 10,000-node census snapshot, the six-sample high-lag series, a
small demo prefix table, and a copy of the packaged org-alias table.
"""

import shutil
from importlib import resources
from pathlib import Path

from partsim.fixtures import write_census_fixture, write_series_fixture

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

DEMO_PREFIXES = """\
prefix,asn,org
10.0.0.0/8,64001,org-demo-backbone
10.64.0.0/10,64002,org-demo-dc
192.168.0.0/16,64003,org-demo-edge
"""


def main() -> None:
    census = write_census_fixture(DATA / "census")
    series = write_series_fixture(DATA / "series")
    (DATA / "prefixes.csv").write_text(DEMO_PREFIXES, "utf-8")
    aliases = resources.files("partsim").joinpath("data/org_aliases.csv").read_text("utf-8")
    (DATA / "org_aliases.csv").write_text(aliases, "utf-8")
    print(f"wrote {census}")
    for path in series:
        print(f"wrote {path}")
    print(f"wrote {DATA / 'prefixes.csv'}")
    print(f"wrote {DATA / 'org_aliases.csv'}")


if __name__ == "__main__":
    main()
