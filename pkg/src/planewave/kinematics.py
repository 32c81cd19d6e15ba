"""Exact zero-density motion of a cold electron fluid in a transverse plane wave.

With xi = x0 - z, an electron initially at rest with label (Z, X_perp) moves as

    z = x0 - Xi^{-1}(x0 - Z),    x_perp = X_perp + Y_perp(x0 - z),

where Y = int_0^xi u^(0) and Xi(xi) = xi + Y^3(xi) is strictly increasing.
All primitives are tabulated once on a xi grid (:class:`MotionTables`) and
evaluated off-node with Hermite interpolants that use the exact slopes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import pulse as pl
from .constants import E_CHARGE
from .numerics import Grid, MonotoneTable, OutOfRangeError, cumulative_integral

NODES_PER_LENGTH = 20_000
MIN_NODES_PER_WAVELENGTH = 16

TRAJECTORY_COLUMNS = ("x0_cm", "z_cm", "xperp1_cm", "xperp2_cm", "gamma", "uz")


class ResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class FluidLabel:
    Z: float
    X_perp: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class WorldPoint:
    x0: float
    z: float

    @property
    def xi(self):
        return self.x0 - self.z

    @property
    def xi_minus(self):
        return self.x0 + self.z


def default_grid(spec: pl.PulseSpec, n_per_length=NODES_PER_LENGTH, xi_min=0.0):
    """Uniform grid from ``xi_min`` (<= 0) to the end of the pulse support."""
    l = spec.length
    if xi_min > 0:
        raise ValueError("grid must start at or before the wavefront xi = 0")
    n = max(int(n_per_length), 1)
    before = int(math.ceil(-xi_min / l * n - 1e-9))  # whole steps, so xi = 0 stays a node
    return Grid.linspace(-before * l / n, l, n + before + 1)


@dataclass(frozen=True, eq=False)
class MotionTables:
    pulse: pl.PulseSpec
    grid: Grid
    u_perp: np.ndarray
    u_z: np.ndarray
    gamma: np.ndarray
    Y_perp: np.ndarray
    Y3: np.ndarray
    V3: np.ndarray
    Xi: MonotoneTable
    V3_table: MonotoneTable
    eta_map: MonotoneTable  # eta -> eta + 2 Y^3(eta)
    _Yp: CubicHermiteSpline | None = field(default=None, repr=False)

    @property
    def xi0(self):
        return self.pulse.peak

    @property
    def covers_support(self):
        return self.grid.stop >= self.pulse.length

    def _check_upper(self, xi):
        xi = np.asarray(xi, dtype=float)
        if not self.covers_support and np.any(xi > self.grid.stop):
            raise OutOfRangeError(float(np.max(xi)), self.grid.stop, "upper")
        return xi

    def Y3_at(self, xi):
        xi = self._check_upper(xi)
        inner = np.clip(xi, self.grid.start, self.grid.stop)
        y = self.Xi(inner) - inner
        return np.where(xi < 0.0, 0.0, y)

    def V3_at(self, xi):
        """V^3 continues linearly with slope Y^3(end) past the grid."""
        xi = self._check_upper(xi)
        inner = np.clip(xi, self.grid.start, self.grid.stop)
        v = self.V3_table(inner) + self.Y3[-1] * np.maximum(xi - self.grid.stop, 0.0)
        return np.where(xi < 0.0, 0.0, v)

    def Y_perp_at(self, xi):
        xi = self._check_upper(xi)
        if self._Yp is None:
            return np.zeros(np.shape(xi) + (2,))
        inner = np.clip(xi, self.grid.start, self.grid.stop)
        y = self._Yp(inner)
        return np.where((xi < 0.0)[..., None], 0.0, y)

    def u_z_at(self, xi):
        return pl.longitudinal_momentum_zero(self.pulse, xi)

    def gamma_at(self, xi):
        return pl.gamma_zero(self.pulse, xi)

    def u_perp_at(self, xi):
        return pl.transverse_momentum_zero(self.pulse, xi)

    def Xi_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        return xi + self.Y3_at(xi)

    def Xi_inverse(self, y):
        """Xi^{-1}: identity for y <= 0, shifted identity past the grid."""
        y = np.asarray(y, dtype=float)
        top = self.Xi.hi
        if np.any(y > top) and not self.covers_support:
            raise OutOfRangeError(float(np.max(y)), top, "upper")
        inner = self.Xi.invert(np.clip(y, 0.0, top))
        out = np.where(y <= 0.0, y, inner)
        out = np.where(y > top, y - self.Y3[-1], out)
        return float(out) if out.ndim == 0 else out


def build_motion_tables(spec: pl.PulseSpec, grid: Grid | None = None) -> MotionTables:
    grid = default_grid(spec) if grid is None else grid
    if grid.start > 0:
        raise ValueError("grid must contain the wavefront xi = 0")
    if spec.mode == "oscillatory":
        h = np.max(np.diff(grid.points))
        if spec.wavelength / h < MIN_NODES_PER_WAVELENGTH:
            raise ResolutionError(
                f"{spec.wavelength / h:.1f} nodes per wavelength; need >= {MIN_NODES_PER_WAVELENGTH}")
    x = grid.points
    u_perp = pl.transverse_momentum_zero(spec, x)
    u_z = pl.longitudinal_momentum_zero(spec, x)
    du_z = pl.longitudinal_momentum_slope(spec, x)
    gamma = 1.0 + u_z

    Y3 = cumulative_integral(u_z, grid, derivatives=du_z)
    V3 = cumulative_integral(Y3, grid, derivatives=u_z)
    if spec.mode == "oscillatory":
        Y_perp = cumulative_integral(u_perp, grid, derivatives=pl.transverse_momentum_slope(spec, x))
        Yp = CubicHermiteSpline(x, Y_perp, u_perp, axis=0, extrapolate=False)
    else:
        # the carrier phase is averaged out: the transverse excursion is O(w/k)
        Y_perp = np.zeros_like(u_perp)
        Yp = None

    Xi = MonotoneTable(grid, x + Y3, strict=True, slopes=gamma)
    V3_table = MonotoneTable(grid, V3, strict=False, slopes=Y3)
    eta_map = MonotoneTable(grid, x + 2 * Y3, strict=True, slopes=1.0 + 2 * u_z)
    for a in (u_perp, u_z, gamma, Y_perp, Y3, V3):
        a.setflags(write=False)
    return MotionTables(spec, grid, u_perp, u_z, gamma, Y_perp, Y3, V3, Xi, V3_table, eta_map, Yp)


def xi_of(tables: MotionTables, x0, Z):
    """Retarded phase Xi^{-1}(x0 - Z) seen by the electron labelled Z at time x0."""
    return tables.Xi_inverse(np.asarray(x0, dtype=float) - Z)


def trajectory_zero(tables: MotionTables, x0, label: FluidLabel):
    xi = np.asarray(xi_of(tables, x0, label.Z))
    z = np.asarray(x0, dtype=float) - xi
    x_perp = np.asarray(label.X_perp, dtype=float) + tables.Y_perp_at(xi)
    return z, x_perp


def label_from_position(tables: MotionTables, x0, z, x_perp=(0.0, 0.0)) -> FluidLabel:
    xi = np.asarray(x0, dtype=float) - np.asarray(z, dtype=float)
    Z = np.asarray(z, dtype=float) - tables.Y3_at(xi)
    X = np.asarray(x_perp, dtype=float) - tables.Y_perp_at(xi)
    if Z.ndim == 0:
        return FluidLabel(float(Z), tuple(float(c) for c in X))
    return FluidLabel(Z, X)


def proper_time(tables: MotionTables, x0, Z):
    """c tau elapsed since the wavefront reached Z (negative before that)."""
    return xi_of(tables, x0, Z)


def density_zero(tables: MotionTables, n0, x0, z):
    """n^(0) = n0 theta(Z) gamma(x0 - z) for a step profile n0 theta(Z)."""
    xi = np.asarray(x0, dtype=float) - np.asarray(z, dtype=float)
    Z = np.asarray(z, dtype=float) - tables.Y3_at(xi)
    return n0 * np.where(Z >= 0.0, 1.0, 0.0) * tables.gamma_at(xi)


def recover_from_s(u_perp, s):
    """(gamma, u_z, beta_perp, beta_z) from u_perp and s = gamma - u_z."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("s must be positive")
    u_perp = np.asarray(u_perp, dtype=float)
    u2 = np.sum(u_perp * u_perp, axis=-1)
    gamma = (1.0 + u2 + s * s) / (2 * s)
    u_z = ((1.0 - s) * (1.0 + s) + u2) / (2 * s)  # no cancellation near s = 1
    return gamma, u_z, u_perp / gamma[..., None], u_z / gamma


def transverse_fields(spec: pl.PulseSpec, x0, z):
    """(E_perp, B) of the free wave; B = z_hat ^ E_perp."""
    xi = np.asarray(x0, dtype=float) - np.asarray(z, dtype=float)
    E = pl.electric_field(spec, xi)
    B = np.stack([-E[..., 1], E[..., 0]], -1)
    return E, B


def longitudinal_field(n0, x0, z, tables: MotionTables):
    """E^z in statvolt/cm for a step density of immobile ions."""
    z = np.asarray(z, dtype=float)
    Z = np.asarray(label_from_position(tables, x0, z).Z, dtype=float)
    return 4 * math.pi * E_CHARGE * n0 * (np.where(z >= 0, z, 0.0) - np.where(Z >= 0, Z, 0.0))


def trajectory_samples(tables: MotionTables, labels, x0_values):
    """Rows (x0, z, x1, x2, gamma, u_z) for each label over ``x0_values``."""
    x0 = np.asarray(x0_values, dtype=float)
    rows = []
    for lab in labels:
        z, xp = trajectory_zero(tables, x0, lab)
        xi = x0 - z
        xp = np.broadcast_to(xp, x0.shape + (2,))
        rows.append(np.column_stack([x0, z, xp[:, 0], xp[:, 1], tables.gamma_at(xi), tables.u_z_at(xi)]))
    return np.vstack(rows) if rows else np.empty((0, 6))


def write_csv(path, columns, rows):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for row in rows:
            wr.writerow([repr(float(v)) for v in row])
    return path


def write_trajectory_csv(path, rows):
    return write_csv(path, TRAJECTORY_COLUMNS, rows)
