"""Transverse plane-wave pulses: envelopes, zero-density momenta, closed forms.

A pulse is a modulating amplitude ``w(xi)`` (dimensionless, ``e eps_s / k m c^2``)
times a carrier of wavelength ``lambda``. Two evaluation modes are supported:

* ``"oscillatory"``: the exact carrier, ``u_perp = w eps_p(xi)``;
* ``"averaged"``: period-averaged quantities, ``|u_perp| = sqrt(p) w`` and
  ``u_z = (p/2) w^2`` with ``p = 1`` (circular) or ``1/2`` (linear).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import E_CHARGE, MC2_ERG

POLARIZATIONS = ("linear", "circular")
MODES = ("averaged", "oscillatory")


@dataclass(frozen=True)
class Gaussian:
    """``a exp(-(xi - center)^2 / 2 sigma)`` truncated to ``[0, length]``."""

    amplitude: float
    sigma: float  # cm^2
    center: float  # cm
    length: float  # cm

    def __post_init__(self):
        if self.amplitude <= 0 or self.sigma <= 0 or self.length <= 0:
            raise ValueError("gaussian amplitude, sigma and length must be positive")

    @property
    def support(self):
        return 0.0, self.length

    @property
    def peak(self):
        return self.center

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        inside = (xi >= 0.0) & (xi <= self.length)
        return np.where(inside, self.amplitude * np.exp(-(xi - self.center) ** 2 / (2 * self.sigma)), 0.0)

    def derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        return -(xi - self.center) / self.sigma * self.value(xi)


@dataclass(frozen=True)
class Polynomial:
    """``a [1/4 - ((xi - center)/support)^2]^2`` on ``[center -+ support/2]``."""

    amplitude: float
    support_length: float  # l_p, cm
    center: float  # cm

    def __post_init__(self):
        if self.amplitude <= 0 or self.support_length <= 0:
            raise ValueError("polynomial amplitude and support must be positive")
        if self.center < 0.5 * self.support_length:
            raise ValueError("polynomial support must lie in xi >= 0")

    @property
    def support(self):
        half = 0.5 * self.support_length
        return self.center - half, self.center + half

    @property
    def peak(self):
        return self.center

    def _q(self, xi):
        t = (np.asarray(xi, dtype=float) - self.center) / self.support_length
        return np.maximum(0.25 - t * t, 0.0), t

    def value(self, xi):
        q, _ = self._q(xi)
        return self.amplitude * q * q

    def derivative(self, xi):
        q, t = self._q(xi)
        return self.amplitude * 2 * q * (-2 * t / self.support_length)


@dataclass(frozen=True, eq=False)
class Sampled:
    """Tabulated envelope, shape-preserving (PCHIP) between samples."""

    xi: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        w = np.asarray(self.w, dtype=float)
        if xi.ndim != 1 or xi.shape != w.shape or xi.size < 2:
            raise ValueError("sampled envelope needs matching 1-d xi and w columns")
        if np.any(np.diff(xi) <= 0):
            raise ValueError("sampled xi must be strictly increasing")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("sampled w must be finite and nonnegative")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "_interp", PchipInterpolator(xi, w, extrapolate=False))

    @classmethod
    def from_csv(cls, path):
        with open(Path(path), newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["xi_cm", "w"]:
                raise ValueError(f"{path}: expected header 'xi_cm,w'")
            rows = [(float(r["xi_cm"]), float(r["w"])) for r in reader]
        xi, w = np.array(rows).T
        return cls(xi, w)

    @property
    def support(self):
        return max(float(self.xi[0]), 0.0), float(self.xi[-1])

    @property
    def peak(self):
        return float(self.xi[int(np.argmax(self.w))])

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        v = np.nan_to_num(self._interp(xi), nan=0.0)
        return np.where(xi < 0.0, 0.0, np.maximum(v, 0.0))

    def derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        d = np.nan_to_num(self._interp.derivative()(xi), nan=0.0)
        return np.where(xi < 0.0, 0.0, d)


@dataclass(frozen=True)
class PulseSpec:
    envelope: Gaussian | Polynomial | Sampled
    wavelength: float  # cm
    polarization: str = "linear"
    mode: str = "averaged"

    def __post_init__(self):
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        start, end = self.envelope.support
        if self.wavelength > (end - start) / 10:
            warnings.warn("wavelength is not small compared to the pulse length", stacklevel=2)

    @property
    def p(self):
        """Polarization factor: 1 circular, 1/2 linear."""
        return 1.0 if self.polarization == "circular" else 0.5

    @property
    def k(self):
        return 2 * math.pi / self.wavelength

    @property
    def length(self):
        return self.envelope.support[1]

    @property
    def peak(self):
        return self.envelope.peak


def envelope(spec: PulseSpec, xi):
    return spec.envelope.value(xi)


def _carriers(spec, xi):
    phase = spec.k * np.asarray(xi, dtype=float)
    s, c = np.sin(phase), np.cos(phase)
    if spec.polarization == "linear":
        zero = np.zeros_like(s)
        return np.stack([s, zero], -1), np.stack([c, zero], -1)
    return np.stack([s, -c], -1), np.stack([c, s], -1)


def transverse_momentum_zero(spec: PulseSpec, xi):
    """u_perp^(0)(xi) as an (..., 2) array."""
    w = envelope(spec, xi)
    if spec.mode == "averaged":
        return np.stack([math.sqrt(spec.p) * w, np.zeros_like(w)], -1)
    eps_p, _ = _carriers(spec, xi)
    return w[..., None] * eps_p


def transverse_momentum_slope(spec: PulseSpec, xi):
    """d u_perp^(0) / d xi, i.e. -(e / m c^2) eps_perp."""
    dw = spec.envelope.derivative(xi)
    if spec.mode == "averaged":
        return np.stack([math.sqrt(spec.p) * dw, np.zeros_like(dw)], -1)
    eps_p, eps_o = _carriers(spec, xi)
    w = envelope(spec, xi)
    return dw[..., None] * eps_p + spec.k * w[..., None] * eps_o


def longitudinal_momentum_zero(spec: PulseSpec, xi):
    if spec.mode == "averaged":
        return 0.5 * spec.p * envelope(spec, xi) ** 2
    u = transverse_momentum_zero(spec, xi)
    return 0.5 * np.sum(u * u, axis=-1)


def longitudinal_momentum_slope(spec: PulseSpec, xi):
    u = transverse_momentum_zero(spec, xi)
    return np.sum(u * transverse_momentum_slope(spec, xi), axis=-1)


def gamma_zero(spec: PulseSpec, xi):
    return 1.0 + longitudinal_momentum_zero(spec, xi)


def vector_potential(spec: PulseSpec, xi):
    """alpha_perp(xi) in statvolt: the electron has u_perp = e alpha / m c^2."""
    return (MC2_ERG / E_CHARGE) * transverse_momentum_zero(spec, xi)


def electric_field(spec: PulseSpec, xi):
    """eps_perp = -alpha_perp' (statvolt/cm); averaged mode gives the rms field."""
    w = envelope(spec, xi)
    scale = MC2_ERG / E_CHARGE
    if spec.mode == "averaged":
        return np.stack([math.sqrt(spec.p) * scale * spec.k * w, np.zeros_like(w)], -1)
    return -scale * transverse_momentum_slope(spec, xi)


_Y_COEF = np.array([1 / 9, -1 / 2, 6 / 7, -2 / 3, 1 / 5])  # s^9 .. s^5
_V_COEF = np.array([1 / 90, -1 / 18, 3 / 28, -2 / 21, 1 / 30])  # s^10 .. s^6


def polynomial_primitives_closed(spec: PulseSpec, xi):
    """Closed-form (Y^3, V^3) for the polynomial envelope in averaged mode.

    Y^3 is constant past the support; V^3 continues as its exact primitive,
    i.e. linearly with slope Y^3(end).
    """
    env = spec.envelope
    if not isinstance(env, Polynomial):
        raise TypeError("closed-form primitives exist only for the polynomial envelope")
    if spec.mode != "averaged":
        raise ValueError("closed-form primitives are for the envelope-averaged mode")
    xi = np.asarray(xi, dtype=float)
    lp = env.support_length
    start, end = env.support
    s = np.clip((xi - start) / lp, 0.0, 1.0)
    pref = 0.5 * spec.p * env.amplitude ** 2
    y = pref * lp * np.polyval(np.append(_Y_COEF, [0, 0, 0, 0, 0]), s)
    v = pref * lp ** 2 * np.polyval(np.append(_V_COEF, [0, 0, 0, 0, 0, 0]), s)
    past = np.maximum(xi - end, 0.0)
    y_end = pref * lp * np.sum(_Y_COEF)
    return y, v + y_end * past
