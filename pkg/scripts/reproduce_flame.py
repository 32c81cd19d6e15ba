"""FLAME slingshot estimates for the two pancake radii (nu = 1 and nu = 2).

    python3 scripts/reproduce_flame.py [--grid-n N] [--out DIR]
"""

import argparse
from dataclasses import dataclass, replace
from pathlib import Path

from planewave import kinematics as km
from planewave import slingshot as sl


@dataclass(frozen=True)
class Scenario:
    name: str
    laser: sl.LaserSpec
    offset: sl.OffsetPolicy


SCENARIOS = (
    Scenario("nu1", sl.FLAME, sl.OffsetPolicy("lp_fraction", 1 / 20)),
    Scenario("nu2", replace(sl.FLAME, nu=2.0), sl.OffsetPolicy("fwhm_fraction", 0.19)),
    # same radius, circular polarization
    Scenario("nu1_circular", replace(sl.FLAME, polarization="circular"), sl.OffsetPolicy("lp_fraction", 1 / 20)),
)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--grid-n", type=int, default=km.NODES_PER_LENGTH)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for sc in SCENARIOS:
        report = sl.run_scenario(sc.laser, sc.offset, args.grid_n)
        print(f"== {sc.name}")
        print(report.to_text())
        (out / f"flame_{sc.name}.txt").write_text(report.to_keyvalue())


if __name__ == "__main__":
    main()
