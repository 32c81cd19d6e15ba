"""Invariant suite run by ``planewave validate``.

Each check returns ``(ok, detail)``; :func:`run_suite` collects them by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import correction as co
from . import kinematics as km
from . import pulse as pl
from . import slingshot as sl
from .numerics import Grid, cumulative_integral

REL = 1e-4


@dataclass
class Context:
    laser: sl.LaserSpec
    tables: km.MotionTables  # polynomial envelope, averaged
    gauss: km.MotionTables
    osc: km.MotionTables  # polynomial envelope, oscillatory carrier
    fo: co.FirstOrderTables
    fo_gauss: co.FirstOrderTables
    plasma: co.PlasmaSpec


def build_context(laser: sl.LaserSpec, offset=sl.OffsetPolicy(), n_per_length=km.NODES_PER_LENGTH):
    m, l, g, p = sl.matched_pulses(laser)
    tp = km.build_motion_tables(p, km.default_grid(p, n_per_length))
    tg = km.build_motion_tables(g, km.default_grid(g, n_per_length))
    osc = km.build_motion_tables(replace(p, mode="oscillatory"), tp.grid)
    plasma = co.solve_density_for_turning(tg, l / 2 + offset.offset(m, laser))
    return Context(laser, tp, tg, osc, co.build_first_order(tp, plasma), co.build_first_order(tg, plasma), plasma)


def _rng():
    return np.random.default_rng(20240611)


# numerics -------------------------------------------------------------------

def check_integral_linear(ctx):
    grid = ctx.tables.grid
    x = grid.points
    f1, f2 = np.sin(3e3 * x), ctx.tables.u_z
    lhs = cumulative_integral(2 * f1 - 3 * f2, grid)
    rhs = 2 * cumulative_integral(f1, grid) - 3 * cumulative_integral(f2, grid)
    err = np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))
    return err < 1e-12, f"rel err {err:.2e}"


def check_integral_additive(ctx):
    grid = ctx.tables.grid
    Y = ctx.tables.Y3
    k = len(grid) // 3
    sub = Grid(grid.points[k:] - grid.points[k])
    part = cumulative_integral(ctx.tables.u_z[k:], sub)
    err = np.max(np.abs(Y[k] + part - Y[k:])) / Y[-1]
    return err < 1e-8, f"rel err {err:.2e}"


def check_inversion_round_trip(ctx):
    xs = _rng().uniform(0, ctx.tables.grid.stop, 100)
    err = np.max(np.abs(ctx.tables.Xi_inverse(ctx.tables.Xi_at(xs)) - xs))
    return err < 1e-10, f"max abs err {err:.2e} cm"


def check_convergence_order(ctx):
    # stop inside the support so the end-point error term does not vanish
    spec = ctx.tables.pulse
    start, _ = spec.envelope.support
    end = start + 0.3 * spec.envelope.support_length
    ref = float(pl.polynomial_primitives_closed(spec, end)[0])
    errs = []
    for n in (201, 401):
        g = Grid.linspace(0, end, n)
        errs.append(abs(cumulative_integral(pl.longitudinal_momentum_zero(spec, g.points), g)[-1] - ref))
    order = math.log2(errs[0] / errs[1])
    return order >= 1.9, f"order {order:.3f}"


# pulse ----------------------------------------------------------------------

def check_envelope_nonnegative(ctx):
    x = np.linspace(-1e-3, ctx.tables.grid.stop + 1e-3, 4001)
    w = pl.envelope(ctx.tables.pulse, x)
    return bool(np.all(w >= 0) and np.all(w[x <= 0] == 0)), f"min w {w.min():.3g}"


def check_envelope_symmetric(ctx):
    worst = 0.0
    for t in (ctx.tables, ctx.gauss):
        d = np.linspace(0, t.xi0, 501)
        a, b = pl.envelope(t.pulse, t.xi0 + d), pl.envelope(t.pulse, t.xi0 - d)
        worst = max(worst, float(np.max(np.abs(a - b)) / np.max(a)))
    return worst < 1e-12, f"max rel asymmetry {worst:.2e}"


def check_velocity_ratio(ctx):
    x = ctx.osc.grid.points
    u = ctx.osc.u_perp
    m = np.linalg.norm(u, axis=-1) > 1e-6
    _, _, bp, bz = km.recover_from_s(u[m], np.ones(m.sum()))
    ratio = np.linalg.norm(bp, axis=-1) / bz
    err = np.max(np.abs(ratio * np.linalg.norm(u[m], axis=-1) / 2 - 1))
    return err < 1e-10, f"max rel err {err:.2e} on {m.sum()} nodes of {x.size}"


def check_closed_form(ctx):
    y, v = pl.polynomial_primitives_closed(ctx.tables.pulse, ctx.tables.grid.points)
    e1 = np.max(np.abs(ctx.tables.Y3 - y)) / y[-1]
    e2 = np.max(np.abs(ctx.tables.V3 - v)) / v[-1]
    return max(e1, e2) < 1e-8, f"Y3 {e1:.2e}, V3 {e2:.2e}"


# kinematics -----------------------------------------------------------------

def check_gamma(ctx):
    t = ctx.tables
    ok = np.all(t.gamma >= 1) and np.allclose(t.gamma, 1 + t.u_z, rtol=0, atol=0)
    return bool(ok), f"min gamma {t.gamma.min():.6g}"


def check_Y3_monotone(ctx):
    t = ctx.tables
    d = np.diff(t.Y3)
    ok = np.all(d >= 0) and np.all(t.Y3[t.grid.points <= 0] == 0)
    return bool(ok), f"min increment {d.min():.3g}"


def check_Xi_strict(ctx):
    d = np.diff(ctx.tables.grid.points + ctx.tables.Y3)
    return bool(np.all(d > 0)), f"min increment {d.min():.3g}"


def check_V3_convex(ctx):
    v = ctx.tables.V3
    d2 = np.diff(v, 2)
    ok = np.all(np.diff(v) >= 0) and np.all(d2 >= -1e-12 * v[-1])
    return bool(ok), f"min second difference {d2.min():.3g}"


def check_V3_over_Y3(ctx):
    worst = -np.inf
    for t in (ctx.tables, ctx.gauss):
        x = t.grid.points
        m = t.Y3 > 0
        worst = max(worst, float(np.max(t.V3[m] / t.Y3[m] / (x[m] / 2))))
    # equality holds at the end of a symmetric pulse
    return worst <= 1 + 1e-12, f"max (V3/Y3)/(xi/2) {worst:.12f}"


def _fd_points(ctx, n=50):
    rng = _rng()
    t = ctx.tables
    Z = rng.uniform(0, 2e-3, n)
    x0 = Z + rng.uniform(0.1, 0.9, n) * t.Xi.hi
    return x0, Z


def check_dz_dZ(ctx):
    t = ctx.tables
    x0, Z = _fd_points(ctx)
    h = 1e-8
    z1, _ = km.trajectory_zero(t, x0, km.FluidLabel(Z + h))
    z0, _ = km.trajectory_zero(t, x0, km.FluidLabel(Z - h))
    d = (z1 - z0) / (2 * h)
    return bool(np.all((d > 0) & (d <= 1 + 1e-6))), f"range [{d.min():.4f}, {d.max():.4f}]"


def check_label_derivatives(ctx):
    t = ctx.tables
    x0, Z = _fd_points(ctx)
    z, _ = km.trajectory_zero(t, x0, km.FluidLabel(Z))
    xi = x0 - z
    h = 1e-9
    lab = lambda a, b: km.label_from_position(t, a, b).Z
    dz = (lab(x0, z + h) - lab(x0, z - h)) / (2 * h)
    d0 = (lab(x0 + h, z) - lab(x0 - h, z)) / (2 * h)
    e1 = np.max(np.abs(dz / t.gamma_at(xi) - 1))
    e0 = np.max(np.abs(d0 + t.u_z_at(xi)) / t.gamma_at(xi))
    return max(e1, e0) < REL, f"d_z Z {e1:.2e}, d_0 Z {e0:.2e}"


def check_betaz_nonnegative(ctx):
    b = ctx.fo.betaz0
    return bool(np.all(b >= 0)), f"min beta_z {b.min():.3g}"


def check_phase_displacement(ctx):
    t = ctx.tables
    xc = np.linspace(0.1, 1, 7) * t.grid.stop
    worst = 0.0
    for Z in (0.0, 1e-3, 5e-2):
        z, _ = km.trajectory_zero(t, t.Xi_at(xc) + Z, km.FluidLabel(Z))
        worst = max(worst, float(np.max(np.abs(z - Z - t.Y3_at(xc)))))
    return worst < 1e-10, f"max deviation {worst:.2e} cm"


def check_round_trip(ctx):
    t = ctx.osc
    rng = _rng()
    Z = rng.uniform(-1e-3, 3e-3, 100)
    x0 = rng.uniform(0, 8e-3, 100)
    worst = 0.0
    for a, b in zip(x0, Z):
        z, xp = km.trajectory_zero(t, a, km.FluidLabel(b, (1e-4, -2e-4)))
        lab = km.label_from_position(t, a, z, xp)
        worst = max(worst, abs(lab.Z - b), abs(lab.X_perp[0] - 1e-4), abs(lab.X_perp[1] + 2e-4))
    return worst < 1e-10, f"max error {worst:.2e} cm"


# correction -----------------------------------------------------------------

def check_r_convex(ctx):
    r = ctx.fo.r
    ok = np.all(np.diff(r) >= 0) and np.all(np.diff(r, 2) >= -1e-12 * r[-1])
    return bool(ok), f"r(end) {r[-1]:.4g}"


def check_s1(ctx):
    fo = ctx.fo
    i0 = fo.grid.zero_index()
    ok = np.all(fo.s1 >= 1) and fo.s1[i0] == 1 and np.array_equal(fo.s1, np.exp(4 * fo.K * ctx.tables.V3))
    return bool(ok), f"s1(0) = {fo.s1[i0]!r}"


def check_origin_values(ctx):
    i0 = ctx.fo.grid.zero_index()
    vals = [ctx.fo.g[i0], ctx.fo.G[i0], ctx.fo.T[i0]]
    return all(v == 0 for v in vals), f"g, G, T at 0: {vals}"


def check_g_increasing(ctx):
    fo = ctx.fo
    x = fo.grid.points
    m = (x >= 0) & (x <= ctx.tables.xi0) & (fo.g > 0)
    d = np.diff(fo.g[m])
    dG = np.diff(fo.G[(x >= 0) & (x <= ctx.tables.xi0)], 2)
    return bool(np.all(d > 0) and np.all(dG >= -1e-15)), f"{m.sum()} nodes with g > 0"


def check_G_bound(ctx):
    fo = ctx.fo
    x = fo.grid.points
    m = (x > 0) & (x <= ctx.tables.xi0) & (ctx.tables.Y3 > 0)
    lhs, rhs = fo.G[m], 2 * fo.K * x[m] ** 2 * ctx.tables.Y3[m]
    return bool(np.all(lhs < rhs)), f"max G/bound {np.max(lhs / rhs):.4f}"


def check_betaz1_below_betaz0(ctx):
    d = ctx.fo.betaz1 - ctx.fo.betaz0
    return bool(np.all(d <= 1e-15)), f"max beta1 - beta0 {d.max():.3g}"


def check_G_nonnegative(ctx):
    return bool(np.all(ctx.fo.G >= 0)), f"min G {ctx.fo.G.min():.3g}"


def check_turning_identity(ctx):
    fo = ctx.fo_gauss
    if fo.xi1 is None:
        return False, "no turning point"
    t = fo.tables
    lhs = 1 + 2 * float(t.u_z_at(fo.xi1))
    rhs = math.exp(8 * fo.K * float(t.V3_at(fo.xi1)))
    err = abs(lhs / rhs - 1)
    return err < 1e-8, f"rel err {err:.2e}"


def check_K_monotone(ctx):
    t = ctx.gauss
    xs = np.linspace(t.xi0, t.grid.stop * 0.999, 40)
    K = np.array([co.solve_density_for_turning(t, x).K for x in xs])
    return bool(np.all(np.diff(K) < 0)), f"K from {K[0]:.4g} to {K[-1]:.4g}"


def check_transverse_bound(ctx):
    rng = _rng()
    t = ctx.osc
    xi0 = t.xi0
    xi = rng.uniform(0, xi0, 1000)
    c = rng.uniform(0, 2 * float(t.Y3_at(xi0)) + xi0, 1000)
    worst = float(np.max(co.bound_ratio(t, xi, c)))
    return worst <= 1, f"max lhs/rhs {worst:.4f}"


# slingshot ------------------------------------------------------------------

def check_zeta_table(ctx):
    m = sl.match_pulse_parameters(ctx.laser)
    err = abs(float(ctx.tables.Y3_at(ctx.tables.xi0)) / m.zeta - 1)
    return err < 0.02, f"rel diff {err:.2e}"


def check_zeta_scaling(ctx):
    base = sl.match_pulse_parameters(ctx.laser).zeta
    worst = 0.0
    for fe in (0.5, 1, 8):
        for fn in (1, 2, 3):
            z = sl.match_pulse_parameters(replace(ctx.laser, energy=ctx.laser.energy * fe,
                                                  nu=ctx.laser.nu * fn)).zeta
            worst = max(worst, abs(z / (base * fe ** (1 / 3) * fn ** (-2 / 3)) - 1))
    return worst < 1e-12, f"max rel dev {worst:.2e}"


def check_H_monotone(ctx):
    zeta = sl.match_pulse_parameters(ctx.laser).zeta
    H = [sl.exit_energy(co.PlasmaSpec(n).K, zeta)[1] for n in np.linspace(0, 2e18, 21)]
    return bool(np.all(np.diff(H) >= 0)), f"H from {H[0]:.4f} to {H[-1]:.4f} MeV"


def check_matched_energy(ctx):
    # Y3(end) = (p/2) int w^2
    ig = float(ctx.gauss.Y3[-1])
    ip = float(ctx.tables.Y3[-1])
    err = abs(ig - ip) / ig
    return err < 0.02, f"rel diff {err:.2e}"


CHECKS = {
    "numerics.integral_linear": check_integral_linear,
    "numerics.integral_additive": check_integral_additive,
    "numerics.inversion_round_trip": check_inversion_round_trip,
    "numerics.convergence_order": check_convergence_order,
    "pulse.envelope_nonnegative": check_envelope_nonnegative,
    "pulse.envelope_symmetric": check_envelope_symmetric,
    "pulse.velocity_direction_ratio": check_velocity_ratio,
    "pulse.closed_form_primitives": check_closed_form,
    "kinematics.gamma_at_least_one": check_gamma,
    "kinematics.Y3_nondecreasing": check_Y3_monotone,
    "kinematics.Xi_strictly_increasing": check_Xi_strict,
    "kinematics.V3_convex": check_V3_convex,
    "kinematics.V3_over_Y3_below_half_xi": check_V3_over_Y3,
    "kinematics.dz_dZ_in_unit_interval": check_dz_dZ,
    "kinematics.label_derivatives": check_label_derivatives,
    "kinematics.betaz_nonnegative": check_betaz_nonnegative,
    "kinematics.displacement_at_fixed_phase": check_phase_displacement,
    "kinematics.trajectory_label_round_trip": check_round_trip,
    "correction.r_convex": check_r_convex,
    "correction.s1_exact": check_s1,
    "correction.origin_values": check_origin_values,
    "correction.g_increasing": check_g_increasing,
    "correction.G_bound": check_G_bound,
    "correction.betaz1_below_betaz0": check_betaz1_below_betaz0,
    "correction.G_nonnegative": check_G_nonnegative,
    "correction.turning_identity": check_turning_identity,
    "correction.K_decreasing": check_K_monotone,
    "correction.transverse_bound": check_transverse_bound,
    "slingshot.zeta_vs_table": check_zeta_table,
    "slingshot.zeta_scaling": check_zeta_scaling,
    "slingshot.H_monotone_in_n0": check_H_monotone,
    "slingshot.matched_energy": check_matched_energy,
}


def inject_fault(ctx: Context) -> Context:
    """Negative control: a Y3 table with one decreasing step."""
    y = np.array(ctx.tables.Y3)
    k = len(y) // 2
    y[k] = y[k - 1] - abs(y[k - 1]) * 1e-3
    y.setflags(write=False)
    return replace(ctx, tables=replace(ctx.tables, Y3=y))


def run_suite(ctx: Context):
    results = {}
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results[name] = (bool(ok), detail)
    return results
