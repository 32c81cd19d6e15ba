"""Grid quadrature, monotone interpolation/inversion and bracketed root finding.

Everything the physics modules tabulate lives on a :class:`Grid` over the
lightcone variable xi (cm). Primitives are built with :func:`cumulative_integral`
and wrapped in :class:`MonotoneTable` whenever they need to be inverted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

INVERSION_TOL = 1e-12
ROOT_TOL = 1e-12


class OutOfRangeError(ValueError):
    """Query outside a table's range. ``bound`` is the violated limit."""

    def __init__(self, value, bound, side):
        self.value = value
        self.bound = bound
        self.side = side
        rel = "below lower" if side == "lower" else "above upper"
        super().__init__(f"{value!r} is {rel} bound {bound!r}")


class BracketError(ValueError):
    pass


class NonMonotoneError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid:
    points: np.ndarray
    uniform: bool = False

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a grid needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def linspace(cls, start, stop, n):
        return cls(np.linspace(start, stop, int(n)), uniform=True)

    @classmethod
    def from_points(cls, points):
        pts = np.asarray(points, dtype=float)
        d = np.diff(pts)
        uniform = bool(d.size and np.allclose(d, d[0], rtol=1e-9, atol=0))
        return cls(pts, uniform=uniform)

    def __len__(self):
        return self.points.size

    @property
    def start(self):
        return float(self.points[0])

    @property
    def stop(self):
        return float(self.points[-1])

    @property
    def step(self):
        if not self.uniform:
            raise ValueError("step is only defined on uniform grids")
        return (self.stop - self.start) / (len(self) - 1)

    def zero_index(self):
        """Index of the node at xi = 0; the grid must contain it."""
        i = int(np.searchsorted(self.points, 0.0))
        if i >= len(self) or self.points[i] != 0.0:
            raise ValueError("grid must contain xi = 0 as a node")
        return i


def cumulative_integral(samples, grid: Grid, derivatives=None) -> np.ndarray:
    """Node values of the primitive that vanishes at xi = 0 (composite trapezoid).

    ``samples`` may carry trailing dimensions (e.g. shape (n, 2) for transverse
    vectors); integration runs along axis 0. When the integrand's derivative is
    known at the nodes, each cell gets the cubic-Hermite end correction
    ``h^2 (f'_k - f'_{k+1}) / 12``, which makes the rule fourth order.
    """
    f = np.asarray(samples, dtype=float)
    if f.shape[0] != len(grid):
        raise ValueError(f"{f.shape[0]} samples for a grid of {len(grid)} points")
    if not np.all(np.isfinite(f)):
        raise ValueError("non-finite sample in integrand")
    i0 = grid.zero_index()
    h = np.diff(grid.points).reshape((-1,) + (1,) * (f.ndim - 1))
    cells = 0.5 * h * (f[1:] + f[:-1])
    if derivatives is not None:
        df = np.asarray(derivatives, dtype=float)
        if df.shape != f.shape:
            raise ValueError("derivatives must match the samples' shape")
        if not np.all(np.isfinite(df)):
            raise ValueError("non-finite derivative sample")
        corrected = cells + h * h * (df[:-1] - df[1:]) / 12.0
        # the cubic can dip below zero between nonnegative samples; keep the
        # primitive of a nonnegative integrand nondecreasing
        nonneg = (f[:-1] >= 0) & (f[1:] >= 0)
        cells = np.where(nonneg, np.maximum(corrected, 0.0), corrected)
    cum = np.concatenate([np.zeros((1,) + f.shape[1:]), np.cumsum(cells, axis=0)])
    return cum - cum[i0]


def _fc_slopes(x, y, slopes=None):
    """Fritsch-Carlson limited node derivatives for monotone data."""
    h = np.diff(x)
    delta = np.diff(y) / h
    if slopes is None:
        d = np.empty_like(y)
        d[1:-1] = 0.5 * (delta[:-1] + delta[1:])
        d[0] = delta[0]
        d[-1] = delta[-1]
        # local extrema / flat neighbours get zero slope
        d[1:-1][delta[:-1] * delta[1:] <= 0] = 0.0
    else:
        d = np.array(slopes, dtype=float)
    d = np.maximum(d, 0.0)

    flat = delta == 0
    safe = np.where(flat, 1.0, delta)
    with np.errstate(over="ignore"):  # huge ratios just mean tau -> 0
        alpha = d[:-1] / safe
        beta = d[1:] / safe
        r = np.hypot(alpha, beta)
        tau = np.where(r > 3.0, 3.0 / np.where(r > 0, r, 1.0), 1.0)
    tau = np.where(flat, 0.0, tau)
    scale = np.ones_like(d)
    scale[:-1] = tau
    scale[1:] = np.minimum(scale[1:], tau)
    return d * scale


@dataclass(frozen=True, eq=False)
class MonotoneTable:
    """Monotone samples on a grid with a monotonicity-preserving interpolant.

    Strictly increasing tables (or any table given exact node ``slopes``) are
    interpolated by cubic Hermite with Fritsch-Carlson limiting; nondecreasing
    tables with flat segments fall back to linear interpolation.
    """

    grid: Grid
    values: np.ndarray
    strict: bool = True
    slopes: np.ndarray | None = None
    _d: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise ValueError("values must be 1-d and match the grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite table value")
        dv = np.diff(v)
        if self.strict and np.any(dv <= 0):
            k = int(np.argmax(dv <= 0))
            raise NonMonotoneError(f"table not strictly increasing at node {k}")
        if np.any(dv < 0):
            k = int(np.argmax(dv < 0))
            raise NonMonotoneError(f"table decreases at node {k}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        x = self.grid.points
        if self.slopes is not None or self.strict or np.all(dv > 0):
            d = _fc_slopes(x, v, self.slopes)
        else:
            d = None
        object.__setattr__(self, "_d", d)

    @property
    def linear(self):
        return self._d is None

    @property
    def lo(self):
        return float(self.values[0])

    @property
    def hi(self):
        return float(self.values[-1])

    def _locate(self, x):
        pts = self.grid.points
        k = np.searchsorted(pts, x, side="right") - 1
        return np.clip(k, 0, len(pts) - 2)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        pts = self.grid.points
        if np.any(x < pts[0]):
            raise OutOfRangeError(float(np.min(x)), float(pts[0]), "lower")
        if np.any(x > pts[-1]):
            raise OutOfRangeError(float(np.max(x)), float(pts[-1]), "upper")
        k = self._locate(x)
        return self._segment_eval(k, (x - pts[k]) / (pts[k + 1] - pts[k]))

    def _segment_eval(self, k, t):
        pts, v = self.grid.points, self.values
        if self._d is None:
            return v[k] + t * (v[k + 1] - v[k])
        h = pts[k + 1] - pts[k]
        t2 = t * t
        t3 = t2 * t
        return ((2 * t3 - 3 * t2 + 1) * v[k] + (t3 - 2 * t2 + t) * h * self._d[k]
                + (-2 * t3 + 3 * t2) * v[k + 1] + (t3 - t2) * h * self._d[k + 1])

    def invert(self, y):
        """Vectorised inverse; see :func:`invert_monotone`."""
        if not self.strict:
            raise NonMonotoneError("inversion needs a strictly increasing table")
        y = np.asarray(y, dtype=float)
        if np.any(y < self.lo):
            raise OutOfRangeError(float(np.min(y)), self.lo, "lower")
        if np.any(y > self.hi):
            raise OutOfRangeError(float(np.max(y)), self.hi, "upper")
        v, pts = self.values, self.grid.points
        k = np.clip(np.searchsorted(v, y, side="right") - 1, 0, len(v) - 2)
        # the interpolant is monotone on each segment: bisect in t to the last bit
        a = np.zeros(y.shape)
        b = np.ones(y.shape)
        for _ in range(62):
            m = 0.5 * (a + b)
            below = self._segment_eval(k, m) < y
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        t = 0.5 * (a + b)
        return pts[k] + t * (pts[k + 1] - pts[k])


def invert_monotone(table: MonotoneTable, y):
    """x with table(x) = y, to |table(x) - y| <= 1e-12 (1 + |y|)."""
    x = table.invert(y)
    return float(x) if np.ndim(x) == 0 else x


def find_root_monotone(f: Callable[[float], float], bracket, tol=ROOT_TOL, maxiter=500):
    """Root of a monotone scalar function inside ``bracket``.

    Bisection safeguarded secant: a secant step is taken whenever it lands
    strictly inside the bracket, but if two consecutive steps fail to halve the
    bracket the next step bisects.
    """
    a, b = float(bracket[0]), float(bracket[1])
    if a > b:
        a, b = b, a
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise BracketError(f"no sign change on [{a!r}, {b!r}]: f = {fa!r}, {fb!r}")

    width = b - a
    stalled = 0
    for _ in range(maxiter):
        if b - a <= tol:
            break
        x = b - fb * (b - a) / (fb - fa)
        if stalled >= 2 or not (a < x < b):
            x = 0.5 * (a + b)
            stalled = 0
        else:
            # keep secant iterates off the endpoints so the bracket always shrinks
            nudge = 0.25 * tol
            x = min(max(x, a + nudge), b - nudge)
        fx = f(x)
        if fx == 0:
            return x
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
        if b - a > 0.5 * width:
            stalled += 1
        else:
            stalled = 0
        width = b - a
    return 0.5 * (a + b)
