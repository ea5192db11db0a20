#!/usr/bin/env python3
"""Scan power-law exponents for the synthetic generator calibration.

Finds exponents where the 10,000-node / 500-AS topology needs exactly 8 ASes
to cover 30% of nodes; the frozen choice lives in
partsim.topology.CALIBRATED_EXPONENT.
"""

from partsim.topology import power_law_sizes


def cover_size(sizes: list[int], target: float) -> int:
    total = sum(sizes)
    acc = 0
    for k, size in enumerate(sorted(sizes, reverse=True), start=1):
        acc += size
        if acc >= target * total:
            return k
    return len(sizes)


def main() -> None:
    print("exponent  cover30  cover50  top8_share")
    for a100 in range(80, 120, 2):
        exponent = a100 / 100
        sizes = power_law_sizes(10_000, 500, exponent)
        top8 = sum(sorted(sizes, reverse=True)[:8]) / 10_000
        print(
            f"{exponent:8.2f}  {cover_size(sizes, 0.30):7d}  "
            f"{cover_size(sizes, 0.50):7d}  {top8:10.3f}"
        )
    print("\nfrozen calibration: exponent 0.88 (cover30 = 8)")


if __name__ == "__main__":
    main()
