"""Slingshot-effect estimates: pulse matching, ionization length, density and exit energy.

A pancake-shaped pulse of radius R = nu zeta hitting a step plasma displaces
the surface electrons by zeta ~ Y^3(xi0); those expelled backwards leave with
gamma_eM = 1 + 2 K zeta^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import correction as co
from . import kinematics as km
from . import pulse as pl
from .constants import E_CHARGE, MC2_ERG, MC2_EV, MC2_MEV, U_FIRST_HE


class IonizationThresholdError(ValueError):
    pass


@dataclass(frozen=True)
class LaserSpec:
    energy: float  # erg
    wavelength: float  # cm
    fwhm: float  # l', width at half height of w^2, cm
    polarization: str = "linear"
    nu: float = 1.0

    def __post_init__(self):
        if self.polarization not in pl.POLARIZATIONS:
            raise ValueError(f"polarization must be one of {pl.POLARIZATIONS}")
        for name in ("energy", "wavelength", "fwhm", "nu"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and nonnegative")
        if self.wavelength == 0 or self.fwhm == 0 or self.nu == 0:
            raise ValueError("wavelength, fwhm and nu must be positive")
        if self.nu < 1:
            warnings.warn("nu < 1: the pulse is narrower than the displacement", stacklevel=2)

    @property
    def p(self):
        return 1.0 if self.polarization == "circular" else 0.5


FLAME = LaserSpec(energy=5e7, wavelength=8e-5, fwhm=7.5e-4, polarization="linear", nu=1.0)


@dataclass(frozen=True)
class Matched:
    zeta: float  # cm
    sigma: float  # cm^2
    a_g: float
    l_p: float  # cm
    a_p: float
    R: float  # cm


def match_pulse_parameters(laser: LaserSpec) -> Matched:
    """Gaussian and polynomial envelopes with the laser's energy and FWHM of w^2."""
    p, lq = laser.p, laser.fwhm
    zeta = (laser.energy * (E_CHARGE * laser.wavelength) ** 2
            / (4 * (laser.nu * math.pi * MC2_ERG) ** 2)) ** (1 / 3)
    sigma = lq * lq / (4 * math.log(2))
    a_g = math.sqrt(8 * math.sqrt(math.log(2)) / (p * math.sqrt(math.pi) * lq) * zeta)
    a_p = math.sqrt(1008 / (p * lq) * zeta)
    return Matched(zeta, sigma, a_g, 2.5 * lq, a_p, laser.nu * zeta)


def pulse_energy(tables: km.MotionTables, R) -> float:
    """EM energy (erg) of a pancake of radius R carrying the tabulated pulse."""
    y_end = float(tables.Y3_at(tables.pulse.length))
    return 2 * (MC2_ERG * math.pi * R) ** 2 / (E_CHARGE * tables.pulse.wavelength) ** 2 * y_end


def ionization_length(a_g, sigma, U_i=U_FIRST_HE) -> float:
    """Length of the interval where the gaussian's Keldysh parameter is <= 1."""
    arg = MC2_EV * a_g * a_g / (4 * U_i)
    if not arg > 1:
        raise IonizationThresholdError(
            f"a_g^2 = {a_g * a_g:.4g} is below the ionization threshold 4 U_i / mc^2 = {4 * U_i / MC2_EV:.4g}")
    return 2 * math.sqrt(sigma * math.log(arg))


def keldysh_parameter(U_i, w, p=0.5):
    """Gamma_i = sqrt(2 U_i / (p mc^2 w^2)); the electron is freed when it is < 1."""
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore"):
        return np.sqrt(2 * U_i / (p * MC2_EV * w * w))


def exit_energy(K, zeta):
    """(gamma_eM, H in MeV) of the backward-expelled electrons."""
    if K < 0 or zeta < 0:
        raise ValueError("K and zeta must be nonnegative")
    gamma = 1.0 + 2 * K * zeta * zeta
    return gamma, MC2_MEV * gamma


@dataclass(frozen=True)
class OffsetPolicy:
    """Where to put the turning point: xi1 = xi0 + offset."""

    kind: str = "lp_fraction"  # lp_fraction | fwhm_fraction | absolute
    value: float = 1 / 20

    def __post_init__(self):
        if self.kind not in ("lp_fraction", "fwhm_fraction", "absolute"):
            raise ValueError(f"unknown offset kind {self.kind!r}")
        if not self.value > 0:
            raise ValueError("offset must be positive")

    def offset(self, matched: Matched, laser: LaserSpec):
        if self.kind == "lp_fraction":
            return self.value * matched.l_p
        if self.kind == "fwhm_fraction":
            return self.value * laser.fwhm
        return self.value


@dataclass(frozen=True)
class SlingshotReport:
    zeta: float
    R: float
    sigma: float
    a_g: float
    l_p: float
    a_p: float
    l: float
    xi0: float
    xi1: float
    K: float
    n0: float
    K_polynomial: float
    xi0sq_K: float
    fwhm_sq_K: float
    gamma_eM: float
    H_MeV: float
    zeta_table: float
    keldysh_xi0: float
    T_gaussian: float
    T_polynomial: float
    max_T: float
    condgood_ratio: float
    bound_ratio_gaussian: float
    bound_ratio_polynomial: float
    valid: bool
    notes: tuple = field(default=())

    UNITS = {
        "zeta": "cm", "R": "cm", "sigma": "cm^2", "l_p": "cm", "l": "cm", "xi0": "cm", "xi1": "cm",
        "K": "cm^-2", "n0": "cm^-3", "K_polynomial": "cm^-2", "H_MeV": "MeV", "zeta_table": "cm",
    }

    def to_keyvalue(self) -> str:
        lines = []
        for k, v in asdict(self).items():
            if k == "notes":
                continue
            unit = self.UNITS.get(k)
            val = str(v).lower() if isinstance(v, bool) else repr(float(v))
            lines.append(f"{k} = {val}" + (f"  # {unit}" if unit else ""))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        status = "valid" if self.valid else "INVALID (first-order correction too large)"
        out = [
            f"displacement zeta      {self.zeta:.4e} cm  (table {self.zeta_table:.4e} cm)",
            f"pancake radius R       {self.R:.4e} cm",
            f"gaussian               a_g = {self.a_g:.4f}, sigma = {self.sigma:.4e} cm^2",
            f"polynomial             a_p = {self.a_p:.4f}, l_p = {self.l_p:.4e} cm",
            f"ionization length l    {self.l:.4e} cm  (xi0 = {self.xi0:.4e} cm, Keldysh {self.keldysh_xi0:.3e})",
            f"turning point xi1      {self.xi1:.4e} cm",
            f"plasma constant K      {self.K:.4e} cm^-2  (xi0^2 K = {self.xi0sq_K:.4f}, l'^2 K = {self.fwhm_sq_K:.4f})",
            f"density n0             {self.n0:.4e} cm^-3",
            f"exit energy H          {self.H_MeV:.4f} MeV  (gamma_eM = {self.gamma_eM:.4f})",
            f"T(xi0)                 gaussian {self.T_gaussian:.4f}, polynomial {self.T_polynomial:.4f}",
            f"condgood ratio         {self.condgood_ratio:.4f}",
            f"W_perp bound ratio     gaussian {self.bound_ratio_gaussian:.3f}, polynomial {self.bound_ratio_polynomial:.3f}",
            f"status                 {status}",
        ]
        out += [f"note: {n}" for n in self.notes]
        return "\n".join(out) + "\n"


MAX_T = 0.5


def matched_pulses(laser: LaserSpec, U_i=U_FIRST_HE, mode="averaged"):
    """(matched, l, gaussian spec, polynomial spec) centred at xi0 = l / 2."""
    m = match_pulse_parameters(laser)
    l = ionization_length(m.a_g, m.sigma, U_i)
    xi0 = l / 2
    gauss = pl.PulseSpec(pl.Gaussian(m.a_g, m.sigma, xi0, l), laser.wavelength, laser.polarization, mode)
    poly = pl.PulseSpec(pl.Polynomial(m.a_p, m.l_p, xi0), laser.wavelength, laser.polarization, mode)
    return m, l, gauss, poly


def run_scenario(laser: LaserSpec, offset: OffsetPolicy = OffsetPolicy(), n_per_length=km.NODES_PER_LENGTH,
                 U_i=U_FIRST_HE, n0=None, check_bound=True) -> SlingshotReport:
    """Match, pick xi1, solve for the density, correct to first order and estimate H.

    ``n0`` overrides the density from the turning-point solve.
    """
    m, l, gauss, poly = matched_pulses(laser, U_i)
    xi0 = l / 2
    tg = km.build_motion_tables(gauss, km.default_grid(gauss, n_per_length))
    tp = km.build_motion_tables(poly, km.default_grid(poly, n_per_length))
    xi1 = xi0 + offset.offset(m, laser)
    if xi1 > l:
        raise ValueError(f"xi1 = {xi1:.4e} cm lies past the pulse end l = {l:.4e} cm")

    plasma_g = co.solve_density_for_turning(tg, xi1)
    K_p = co.solve_density_for_turning(tp, xi1).K
    plasma = plasma_g if n0 is None else co.PlasmaSpec(n0)
    K = plasma.K

    fo_g = co.build_first_order(tg, plasma)
    fo_p = co.build_first_order(tp, plasma)
    ratio_g = ratio_p = 0.0
    if check_bound:
        ratio_g = co.validity_check(fo_g, tg, plasma).bound_ratio
        ratio_p = co.validity_check(fo_p, tp, plasma).bound_ratio
    max_T = max(float(fo_g.T_at(xi0)), float(np.max(fo_g.T[tg.grid.points <= xi0])),
                float(np.max(fo_p.T[tp.grid.points <= xi0])))
    cg = co.condgood_ratio(tg, K)
    gamma, H = exit_energy(K, m.zeta)
    valid = cg <= co.CONDGOOD_LIMIT and max_T <= MAX_T

    notes = []
    if ratio_g > 1:
        notes.append("gaussian violates the W_perp bound near its truncated front (w(0) > 0)")
    return SlingshotReport(
        zeta=m.zeta, R=m.R, sigma=m.sigma, a_g=m.a_g, l_p=m.l_p, a_p=m.a_p, l=l, xi0=xi0, xi1=xi1,
        K=K, n0=plasma.n0, K_polynomial=K_p, xi0sq_K=xi0 * xi0 * K, fwhm_sq_K=laser.fwhm ** 2 * K,
        gamma_eM=gamma, H_MeV=H, zeta_table=float(tp.Y3_at(xi0)),
        keldysh_xi0=float(keldysh_parameter(U_i, m.a_g, laser.p)),
        T_gaussian=float(fo_g.T_at(xi0)), T_polynomial=float(fo_p.T_at(xi0)), max_T=max_T,
        condgood_ratio=cg, bound_ratio_gaussian=ratio_g, bound_ratio_polynomial=ratio_p,
        valid=valid, notes=tuple(notes))
