"""First Picard correction for a step-density plasma ``n0 theta(Z)`` with immobile ions.

Substituting the zero-density motion into the longitudinal equations gives
s^(1) = exp(r), r = 4 K V^3, hence the corrected longitudinal velocity
beta_z^(1) and the relative displacement error T = G / Y^3. The transverse
momentum picks up u^(1) - u^(0) = -2 K W_perp.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import kinematics as km
from . import pulse as pl
from .constants import density_from_constant, plasma_constant
from .numerics import OutOfRangeError, cumulative_integral, find_root_monotone

T_GUARD = 1e-30  # cm; below this Y^3 is treated as zero and T := 0
CONDGOOD_LIMIT = 0.1
CURVE_COLUMNS = ("xi_cm", "w", "uz0", "Y3_cm", "V3_cm2", "betaz0", "betaz1", "g", "T")


class NoTurningPointError(ValueError):
    pass


@dataclass(frozen=True)
class PlasmaSpec:
    n0: float  # cm^-3

    def __post_init__(self):
        if not (self.n0 >= 0) or not math.isfinite(self.n0):
            raise ValueError("n0 must be finite and nonnegative")

    @property
    def K(self):
        return plasma_constant(self.n0)

    @classmethod
    def from_constant(cls, K):
        if K < 0:
            raise ValueError("K must be nonnegative")
        return cls(density_from_constant(K))


@dataclass(frozen=True, eq=False)
class FirstOrderTables:
    tables: km.MotionTables
    K: float
    r: np.ndarray
    s1: np.ndarray
    betaz0: np.ndarray
    betaz1: np.ndarray
    g: np.ndarray
    G: np.ndarray
    T: np.ndarray
    xi1: float | None = None
    _G: CubicHermiteSpline = field(default=None, repr=False)

    @property
    def grid(self):
        return self.tables.grid

    def G_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        inner = np.clip(xi, self.grid.start, self.grid.stop)
        return np.where(xi <= 0, 0.0, self._G(inner))

    def T_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        y = self.tables.Y3_at(np.minimum(xi, self.grid.stop))
        safe = np.where(y < T_GUARD, 1.0, y)
        return np.where(y < T_GUARD, 0.0, self.G_at(xi) / safe)


def _turning_function(tables, K, xi):
    """1 + 2 u_z - exp(8 K V^3): same sign as beta_z^(1)."""
    with np.errstate(over="ignore"):
        return 1.0 + 2 * tables.u_z_at(xi) - np.exp(8 * K * tables.V3_at(xi))


def build_first_order(tables: km.MotionTables, plasma: PlasmaSpec | float) -> FirstOrderTables:
    K = plasma.K if isinstance(plasma, PlasmaSpec) else float(plasma)
    if K < 0:
        raise ValueError("K must be nonnegative")
    u = tables.u_z
    r = 4 * K * tables.V3
    em = np.expm1(np.minimum(2 * r, 700.0))  # e^{2r} - 1; capped so huge K gives beta_z^(1) -> -1
    den = 2.0 + 2 * u + em  # 1 + 2 u_z + e^{2r}
    betaz0 = u / tables.gamma
    betaz1 = (2 * u - em) / den  # = 2 (1 + 2 u_z) / (1 + 2 u_z + e^{2r}) - 1
    g = (1.0 + 2 * u) * em / den
    G = cumulative_integral(g, tables.grid)
    y = tables.Y3
    T = np.where(y < T_GUARD, 0.0, G / np.where(y < T_GUARD, 1.0, y))
    for arr in (r, betaz0, betaz1, g, G, T):
        arr.setflags(write=False)
    with np.errstate(over="ignore"):
        s1 = np.exp(r)
    fo = FirstOrderTables(tables, K, r, s1, betaz0, betaz1, g, G, T,
                          _G=CubicHermiteSpline(tables.grid.points, G, g))
    try:
        xi1 = first_turning_point(fo)
    except NoTurningPointError:
        xi1 = None
    return replace(fo, xi1=xi1)


def first_turning_point(fo: FirstOrderTables) -> float:
    """Smallest root of beta_z^(1) in (xi0, end of grid]."""
    tables = fo.tables
    if fo.K == 0:
        raise NoTurningPointError("K = 0: beta_z^(1) = beta_z^(0) >= 0 everywhere")
    x = tables.grid.points
    f = _turning_function(tables, fo.K, x)
    after = np.nonzero((x > tables.xi0) & (f <= 0))[0]
    if after.size == 0:
        raise NoTurningPointError(f"beta_z^(1) does not change sign after xi0 for K = {fo.K:.6g}")
    k = int(after[0])
    if f[k] == 0:
        return float(x[k])
    lo = max(float(x[k - 1]), tables.xi0)
    if _turning_function(tables, fo.K, lo) <= 0:
        raise NoTurningPointError(f"beta_z^(1) is already negative at xi0 for K = {fo.K:.6g}")
    return find_root_monotone(lambda s: float(_turning_function(tables, fo.K, s)), (lo, float(x[k])))


def solve_density_for_turning(tables: km.MotionTables, xi1, p=None) -> PlasmaSpec:
    """Density whose first turning point is ``xi1``: K = ln(1 + 2 u_z) / 8 V^3."""
    if p is not None and p != tables.pulse.p:
        raise ValueError(f"p = {p} does not match the tables' polarization (p = {tables.pulse.p})")
    if not 0 < xi1 <= tables.grid.stop:
        raise ValueError("xi1 must lie in (0, end of grid]")
    v = float(tables.V3_at(xi1))
    if v <= 0:
        raise ValueError(f"V^3 vanishes at xi1 = {xi1!r}")
    uz = float(tables.u_z_at(xi1))
    return PlasmaSpec.from_constant(math.log1p(2 * uz) / (8 * v))


def relative_displacement_error(fo: FirstOrderTables, tables: km.MotionTables, x0, Z):
    """T at the retarded phase of electron Z: (dz^(0) - dz^(1)) / dz^(0)."""
    return fo.T_at(km.xi_of(tables, x0, Z))


# transverse correction ------------------------------------------------------

def eta_of(tables: km.MotionTables, xi_minus):
    """Phase eta where the Z = 0 trajectory crosses the line x0 + z = xi_minus."""
    c = np.asarray(xi_minus, dtype=float)
    top = tables.eta_map.hi
    inner = tables.eta_map.invert(np.clip(c, 0.0, top))
    out = np.where(c <= 0, c, inner)
    if np.any(c > top):
        if not tables.covers_support:
            raise OutOfRangeError(float(np.max(c)), top, "upper")
        out = np.where(c > top, c - 2 * tables.Y3[-1], out)
    return out


def xi_hat(tables: km.MotionTables, xi, xi_minus_prime):
    """min(xi, eta(xi_-')): phase at which the characteristic meets the front electron."""
    c = np.asarray(xi_minus_prime, dtype=float)
    if np.any(c < 0):
        raise ValueError("xi_- must be nonnegative")
    return np.minimum(np.asarray(xi, dtype=float), eta_of(tables, c))


_Q_CACHE: "weakref.WeakKeyDictionary[km.MotionTables, CubicHermiteSpline]" = weakref.WeakKeyDictionary()


def _q_spline(tables):
    """Q(eta) = int_0^eta Y_perp (1 + 2 u_z): W_perp after the change xi_-' -> eta."""
    q = _Q_CACHE.get(tables)
    if q is None:
        x = tables.grid.points
        m1 = 1.0 + 2 * tables.u_z
        f = tables.Y_perp * m1[:, None]
        df = tables.u_perp * m1[:, None] + tables.Y_perp * 2 * pl.longitudinal_momentum_slope(tables.pulse, x)[:, None]
        Q = cumulative_integral(f, tables.grid, derivatives=df)
        q = CubicHermiteSpline(x, Q, f, axis=0, extrapolate=False)
        _Q_CACHE[tables] = q
    return q


def _q_at(tables, eta):
    q = _q_spline(tables)
    stop = tables.grid.stop
    inner = np.clip(eta, 0.0, stop)
    past = np.maximum(eta - stop, 0.0)[..., None]
    out = q(inner) + past * tables.Y_perp[-1]
    return np.where((eta <= 0)[..., None], 0.0, out)


@dataclass(frozen=True)
class TransverseCorrection:
    W_perp: np.ndarray  # cm^2
    u_perp0: np.ndarray
    u_perp1: np.ndarray


def transverse_W(tables: km.MotionTables, xi, xi_minus):
    """W_perp(xi, xi_-) = 1/2 int_0^{xi_-} Y_perp(xi_hat(xi, xi_-')) d xi_-'.

    Substituting xi_-' = eta + 2 Y^3(eta) turns the part with eta < xi into a
    tabulated primitive; the rest has the constant integrand Y_perp(xi).
    """
    xi = np.asarray(xi, dtype=float)
    c = np.asarray(xi_minus, dtype=float)
    if np.any(c < 0):
        raise ValueError("point outside the causal region xi_- >= 0")
    xi, c = np.broadcast_arrays(xi, c)
    xi_pos = np.maximum(xi, 0.0)
    m_xi = xi_pos + 2 * tables.Y3_at(xi_pos)
    eta = eta_of(tables, np.minimum(c, m_xi))
    W = 0.5 * (_q_at(tables, eta) + np.maximum(c - m_xi, 0.0)[..., None] * tables.Y_perp_at(xi_pos))
    return np.where((xi <= 0)[..., None], 0.0, W)


def transverse_correction(tables: km.MotionTables, plasma: PlasmaSpec, xi, xi_minus) -> TransverseCorrection:
    W = transverse_W(tables, xi, xi_minus)
    u0 = tables.u_perp_at(xi)
    return TransverseCorrection(W, u0, u0 - 2 * plasma.K * W)


def bound_ratio(tables: km.MotionTables, xi, xi_minus):
    """|u^(1) - u^(0)| / w divided by K lambda xi_- / 2 pi (independent of K).

    Points where w or xi_- vanish have W = 0 and get ratio 0.
    """
    xi, c = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(xi_minus, dtype=float))
    W = np.linalg.norm(transverse_W(tables, xi, c), axis=-1)
    w = pl.envelope(tables.pulse, xi)
    ok = (w > 0) & (c > 0)
    den = np.where(ok, w * tables.pulse.wavelength * c, 1.0)
    return np.where(ok, 4 * math.pi * W / den, 0.0)


def condgood_ratio(tables: km.MotionTables, K, Z=0.0):
    """(2 Y^3(xi0) + xi0 + 2 Z) K lambda / 2 pi; small means the W_perp bound is useful."""
    xi0 = tables.xi0
    return (2 * float(tables.Y3_at(xi0)) + xi0 + 2 * Z) * K * tables.pulse.wavelength / (2 * math.pi)


@dataclass(frozen=True)
class Validity:
    max_T: float
    T_xi0: float
    condgood_ratio: float
    condgood_pass: bool
    bound_ratio: float
    bound_pass: bool


def validity_check(fo: FirstOrderTables, tables: km.MotionTables, plasma: PlasmaSpec,
                   pulse: pl.PulseSpec | None = None, Z=0.0, n_samples=32,
                   oscillatory_tables: km.MotionTables | None = None) -> Validity:
    """Diagnostics on [0, xi0]: T, the condgood ratio and the sampled W_perp bound.

    The bound needs the carrier, so it is evaluated on oscillatory tables of the
    same envelope (built here unless given).
    """
    xi0 = tables.xi0
    x = tables.grid.points
    T_xi0 = float(fo.T_at(xi0))
    inside = (x >= 0) & (x <= xi0)
    max_T = max(float(np.max(fo.T[inside])), T_xi0)
    ratio = condgood_ratio(tables, plasma.K, Z)

    worst = 0.0
    if plasma.K > 0:
        osc = oscillatory_tables
        if osc is None:
            spec = replace(pulse if pulse is not None else tables.pulse, mode="oscillatory")
            osc = km.build_motion_tables(spec, tables.grid)
        xs = np.linspace(0.0, xi0, n_samples)
        cs = np.linspace(0.0, 2 * float(tables.Y3_at(xi0)) + xi0 + 2 * Z, n_samples)
        XI, C = np.meshgrid(xs, cs, indexing="ij")
        worst = float(np.max(bound_ratio(osc, XI, C)))
    return Validity(max_T, T_xi0, ratio, ratio <= CONDGOOD_LIMIT, worst, worst <= 1.0)


def curves(fo: FirstOrderTables):
    """Node table with the columns of :data:`CURVE_COLUMNS`."""
    t = fo.tables
    x = t.grid.points
    return np.column_stack([x, pl.envelope(t.pulse, x), t.u_z, t.Y3, t.V3,
                            fo.betaz0, fo.betaz1, fo.g, fo.T])


def write_curves_csv(path, fo: FirstOrderTables):
    return km.write_csv(path, CURVE_COLUMNS, curves(fo))
