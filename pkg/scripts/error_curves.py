"""First-order curves (w, u_z, Y^3, V^3, beta_z, g, T) for the matched FLAME envelopes.

The density is the one that puts the turning point l_p / 20 behind the peak,
or ``--xi0sq-K`` when given.

    python3 scripts/error_curves.py [--xi0sq-K 2] [--out DIR]
"""

import argparse
from pathlib import Path

from planewave import correction as co
from planewave import kinematics as km
from planewave import slingshot as sl


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--xi0sq-K", type=float, default=None)
    ap.add_argument("--polarization", default="linear", choices=("linear", "circular"))
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    laser = sl.LaserSpec(sl.FLAME.energy, sl.FLAME.wavelength, sl.FLAME.fwhm, args.polarization)
    m, l, gauss, poly = sl.matched_pulses(laser)
    xi0 = l / 2
    tg, tp = km.build_motion_tables(gauss), km.build_motion_tables(poly)
    if args.xi0sq_K is None:
        plasma = co.solve_density_for_turning(tg, xi0 + m.l_p / 20)
    else:
        plasma = co.PlasmaSpec.from_constant(args.xi0sq_K / xi0 ** 2)
    print(f"K = {plasma.K:.4e} cm^-2, n0 = {plasma.n0:.4e} cm^-3, xi0^2 K = {plasma.K * xi0 ** 2:.4f}")
    for name, t in (("gaussian", tg), ("polynomial", tp)):
        fo = co.build_first_order(t, plasma)
        path = co.write_curves_csv(out / f"curves_{args.polarization}_{name}.csv", fo)
        xi1 = "none" if fo.xi1 is None else f"{fo.xi1:.4e} cm"
        print(f"{name:10s} T(xi0) = {float(fo.T_at(xi0)):.4f}  turning point {xi1}  -> {path}")


if __name__ == "__main__":
    main()
