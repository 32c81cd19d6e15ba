"""Grid convergence of Y^3, V^3, K and T(xi0) for the matched polynomial pulse.

Compares plain trapezoid sums with the slope-corrected ones used by the tables.

    python3 scripts/convergence_study.py
"""

import math

import numpy as np

from planewave import correction as co
from planewave import kinematics as km
from planewave import pulse as pl
from planewave import slingshot as sl
from planewave.numerics import Grid, cumulative_integral


def main():
    m, l, _, poly = sl.matched_pulses(sl.FLAME)
    start = poly.envelope.center - poly.envelope.support_length / 2
    x_probe = start + 0.3 * m.l_p
    ref_Y = float(pl.polynomial_primitives_closed(poly, np.array([x_probe]))[0][0])

    print(f"{'n':>7} {'trap err':>11} {'order':>6} {'hermite err':>11} {'order':>6}")
    prev = None
    for n in (101, 201, 401, 801, 1601):
        g = Grid.linspace(0.0, x_probe, n)
        uz = pl.longitudinal_momentum_zero(poly, g.points)
        du = pl.longitudinal_momentum_slope(poly, g.points)
        e_t = abs(cumulative_integral(uz, g)[-1] - ref_Y) / ref_Y
        e_h = abs(cumulative_integral(uz, g, derivatives=du)[-1] - ref_Y) / ref_Y
        if prev is None:
            print(f"{n:7d} {e_t:11.3e} {'':>6} {e_h:11.3e}")
        else:
            o_t = math.log2(prev[0] / e_t) if e_t > 0 else float("nan")
            o_h = math.log2(prev[1] / e_h) if e_h > 0 else float("nan")
            print(f"{n:7d} {e_t:11.3e} {o_t:6.2f} {e_h:11.3e} {o_h:6.2f}")
        prev = (e_t, e_h)

    print()
    print(f"{'nodes/l':>8} {'K (cm^-2)':>14} {'T(xi0)':>10}")
    xi1 = l / 2 + m.l_p / 20
    for n in (1000, 2000, 5000, 20000, 80000):
        t = km.build_motion_tables(poly, km.default_grid(poly, n))
        plasma = co.solve_density_for_turning(t, xi1)
        fo = co.build_first_order(t, plasma)
        print(f"{n:8d} {plasma.K:14.8e} {float(fo.T_at(t.xi0)):10.6f}")


if __name__ == "__main__":
    main()
