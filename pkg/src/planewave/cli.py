"""Command-line front end.

Units: lengths in cm, densities in cm^-3, laser energy in erg, reported
energies in MeV. Parameters come from a flat ``key = value`` config file
(``--config``) and ``--set key=value`` overrides; unset keys take the FLAME
defaults.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from . import correction as co
from . import kinematics as km
from . import slingshot as sl
from . import validation as va

EXIT_OK, EXIT_INVARIANT, EXIT_STRICT, EXIT_USAGE = 0, 1, 2, 64

DEFAULTS = {
    "energy": "5e7",  # erg
    "wavelength": "8e-5",  # cm
    "fwhm": "7.5e-4",  # cm
    "polarization": "linear",
    "nu": "1",
    "U_i": "24",  # eV
    "offset_kind": "lp_fraction",
    "offset_value": "0.05",
    "grid_n": str(km.NODES_PER_LENGTH),
    # optional density: n0 (cm^-3), K (cm^-2) or xi0sq_K; default is the turning-point solve
    "n0": "",
    "K": "",
    "xi0sq_K": "",
    # trajectory
    "envelope": "polynomial",
    "labels": "0",  # comma-separated Z values, cm
    "x0_min": "0",
    "x0_max": "",  # default: 2 l + max Z
    "x0_n": "201",
    # density-solve
    "xi1": "",  # absolute turning point, cm; overrides the offset policy
}


class UsageError(Exception):
    pass


def load_config(path):
    """Flat key = value file; '#' comments; unknown keys rejected."""
    text = Path(path).read_text()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"{path}: {exc}") from None
    items = dict(cp["run"])
    if not items:
        raise UsageError(f"{path}: empty config")
    return items


def resolve(args):
    cfg = dict(DEFAULTS)
    given = {}
    if args.config:
        given.update(load_config(args.config))
    for item in args.set or ():
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        given[k.strip()] = v.strip()
    if getattr(args, "n0", None) is not None:
        given["n0"] = repr(args.n0)
    if args.grid_n is not None:
        given["grid_n"] = str(args.grid_n)
    unknown = sorted(set(given) - set(DEFAULTS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    cfg.update(given)
    return cfg


def _float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError:
        raise UsageError(f"{key} = {cfg[key]!r} is not a number") from None


def laser_from(cfg):
    try:
        return sl.LaserSpec(_float(cfg, "energy"), _float(cfg, "wavelength"), _float(cfg, "fwhm"),
                            cfg["polarization"], _float(cfg, "nu"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def offset_from(cfg):
    try:
        return sl.OffsetPolicy(cfg["offset_kind"], _float(cfg, "offset_value"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def grid_n(cfg):
    n = int(_float(cfg, "grid_n"))
    if n < 2:
        raise UsageError("grid_n must be at least 2")
    return n


def _setup(cfg):
    laser = laser_from(cfg)
    m, l, gauss, poly = sl.matched_pulses(laser, _float(cfg, "U_i"))
    n = grid_n(cfg)
    tg = km.build_motion_tables(gauss, km.default_grid(gauss, n))
    tp = km.build_motion_tables(poly, km.default_grid(poly, n))
    return laser, m, l, tg, tp


def _xi1(cfg, laser, m, l):
    if cfg["xi1"]:
        return _float(cfg, "xi1")
    return l / 2 + offset_from(cfg).offset(m, laser)


def _plasma(cfg, laser, m, l, tg):
    if cfg["n0"]:
        return co.PlasmaSpec(_float(cfg, "n0"))
    if cfg["K"]:
        return co.PlasmaSpec.from_constant(_float(cfg, "K"))
    if cfg["xi0sq_K"]:
        return co.PlasmaSpec.from_constant(_float(cfg, "xi0sq_K") / (l / 2) ** 2)
    return co.solve_density_for_turning(tg, _xi1(cfg, laser, m, l))


def cmd_tabulate(args, cfg):
    laser, m, l, tg, tp = _setup(cfg)
    plasma = _plasma(cfg, laser, m, l, tg)
    stem = Path(args.out or "curves")
    for name, t in (("gaussian", tg), ("polynomial", tp)):
        fo = co.build_first_order(t, plasma)
        path = co.write_curves_csv(stem.with_name(f"{stem.name}_{name}.csv"), fo)
        print(f"{path}: T(xi0) = {float(fo.T_at(t.xi0)):.4f}")
    print(f"K = {plasma.K:.6e} cm^-2, xi0^2 K = {plasma.K * (l / 2) ** 2:.4f}")
    return EXIT_OK


def cmd_trajectory(args, cfg):
    laser, m, l, tg, tp = _setup(cfg)
    if cfg["envelope"] not in ("gaussian", "polynomial"):
        raise UsageError("envelope must be gaussian or polynomial")
    t = tg if cfg["envelope"] == "gaussian" else tp
    try:
        labels = [float(s) for s in cfg["labels"].split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"labels = {cfg['labels']!r} must be comma-separated numbers") from None
    if not labels:
        raise UsageError("no labels given")
    x0_max = _float(cfg, "x0_max") if cfg["x0_max"] else 2 * l + max(labels)
    x0 = np.linspace(_float(cfg, "x0_min"), x0_max, int(_float(cfg, "x0_n")))
    rows = km.trajectory_samples(t, [km.FluidLabel(z) for z in labels], x0)
    path = km.write_trajectory_csv(args.out or "trajectory.csv", rows)
    print(f"{path}: {len(rows)} rows")
    return EXIT_OK


def cmd_slingshot(args, cfg):
    laser = laser_from(cfg)
    n0 = _float(cfg, "n0") if cfg["n0"] else None
    report = sl.run_scenario(laser, offset_from(cfg), grid_n(cfg), _float(cfg, "U_i"), n0=n0)
    sys.stdout.write(report.to_text())
    path = Path(args.out or "slingshot_report.txt")
    path.write_text(report.to_keyvalue())
    print(f"report written to {path}")
    if args.strict and not report.valid:
        return EXIT_STRICT
    return EXIT_OK


def cmd_density_solve(args, cfg):
    laser, m, l, tg, tp = _setup(cfg)
    xi1 = _xi1(cfg, laser, m, l)
    xi0 = l / 2
    lines = [f"xi1 = {xi1!r}  # cm", f"xi0 = {xi0!r}  # cm"]
    for name, t in (("gaussian", tg), ("polynomial", tp)):
        pl_ = co.solve_density_for_turning(t, xi1)
        lines += [f"K_{name} = {pl_.K!r}  # cm^-2", f"n0_{name} = {pl_.n0!r}  # cm^-3",
                  f"xi0sq_K_{name} = {pl_.K * xi0 * xi0!r}"]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_validate(args, cfg):
    ctx = va.build_context(laser_from(cfg), offset_from(cfg), grid_n(cfg))
    if args.inject_fault:
        ctx = va.inject_fault(ctx)
    results = va.run_suite(ctx)
    failed = [k for k, (ok, _) in results.items() if not ok]
    for name, (ok, detail) in results.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    print(f"{len(results) - len(failed)}/{len(results)} invariants hold")
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_INVARIANT
    return EXIT_OK


COMMANDS = {
    "tabulate": (cmd_tabulate, "write first-order curves for both matched envelopes (<out>_gaussian.csv, <out>_polynomial.csv)"),
    "trajectory": (cmd_trajectory, "sample zero-density trajectories of the given labels"),
    "slingshot": (cmd_slingshot, "run the full slingshot scenario and write a key = value report"),
    "density-solve": (cmd_density_solve, "density whose first turning point is xi1"),
    "validate": (cmd_validate, "run the invariant suite; exit 1 on any failure"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="planewave", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--config", help="flat key = value file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", help="output path (stem for tabulate)")
        p.add_argument("--grid-n", type=int, help=f"nodes per pulse length (default {km.NODES_PER_LENGTH})")
        p.add_argument("--strict", action="store_true", help="exit 2 when the scenario is flagged invalid")
        if name == "slingshot":
            p.add_argument("--n0", type=float, help="override the density (cm^-3)")
        if name == "validate":
            p.add_argument("--inject-fault", action="store_true", help="corrupt Y3 (negative control)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command][0](args, cfg)
    except UsageError as exc:
        print(f"planewave: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"planewave: error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT if args.command == "validate" else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
