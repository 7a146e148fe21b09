"""Lattice gauge fields for a flux line threading the grid.

A gauge field stores one phase (radians) per directed lattice link:
``link_x[j, i]`` on the link from node (i, j) to (i+1, j) and
``link_y[j, i]`` on the link from (i, j) to (i, j+1).  The phase is the
line integral of the vector potential along the link, and a hop in the
+x / +y direction multiplies the amplitude by exp(-i * link).

Loop orientation is fixed so that the plaquette right of the origin in
the string gauge carries flux +alpha: plaquette sums run clockwise
(up the left edge, right along the top, down the right edge, left along
the bottom).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .fields import Grid2D, WaveField, _freeze

TWO_PI = 2.0 * np.pi

DESCRIPTOR_ZERO = "zero"
DESCRIPTOR_STRING = "string"
DESCRIPTOR_SYMMETRIC = "symmetric"
DESCRIPTOR_TRANSFORMED = "transformed"


@dataclass(frozen=True, eq=False)
class GaugeField:
    """Per-link phases plus the dimensionless flux alpha = e*Phi_B/(hbar c)."""

    grid: Grid2D
    link_x: np.ndarray = field(repr=False)  # (ny, nx-1)
    link_y: np.ndarray = field(repr=False)  # (ny-1, nx)
    alpha: float = 0.0
    descriptor: str = DESCRIPTOR_ZERO

    def __post_init__(self):
        if self.link_x.shape != (self.grid.ny, self.grid.nx - 1):
            raise ConfigurationError(f"link_x shape {self.link_x.shape} invalid for grid")
        if self.link_y.shape != (self.grid.ny - 1, self.grid.nx):
            raise ConfigurationError(f"link_y shape {self.link_y.shape} invalid for grid")
        if not (np.all(np.isfinite(self.link_x)) and np.all(np.isfinite(self.link_y))):
            raise ConfigurationError("link phases must be finite")
        object.__setattr__(self, "link_x", _freeze(np.ascontiguousarray(self.link_x, dtype=np.float64)))
        object.__setattr__(self, "link_y", _freeze(np.ascontiguousarray(self.link_y, dtype=np.float64)))

    def hop_x(self) -> np.ndarray:
        """Forward hop factors exp(-i link_x)."""
        return np.exp(-1j * self.link_x)

    def hop_y(self) -> np.ndarray:
        return np.exp(-1j * self.link_y)


@dataclass(frozen=True, eq=False)
class GaugeFunction:
    """Per-node gauge phase chi; cut describes an intended branch half-line."""

    grid: Grid2D
    values: np.ndarray = field(repr=False)
    cut: Optional[str] = None

    def __post_init__(self):
        if self.values.shape != self.grid.shape():
            raise ConfigurationError("gauge function shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("gauge function must be finite")
        object.__setattr__(self, "values", _freeze(np.ascontiguousarray(self.values, dtype=np.float64)))


def zero_gauge(grid: Grid2D) -> GaugeField:
    """All link phases zero."""
    return GaugeField(grid, np.zeros((grid.ny, grid.nx - 1)), np.zeros((grid.ny - 1, grid.nx)),
                      alpha=0.0, descriptor=DESCRIPTOR_ZERO)


def _string_row(grid: Grid2D) -> int:
    """Index j of the y-link row straddling y = 0; errors if y=0 sits on a node row."""
    y = grid.y
    tol = 1e-9 * grid.dy
    if np.any(np.abs(y) < tol):
        raise ConfigurationError("y = 0 falls on a node row; offset y0 so the flux string runs between rows")
    below = np.nonzero(y < 0)[0]
    above = np.nonzero(y > 0)[0]
    if len(below) == 0 or len(above) == 0:
        raise ConfigurationError("grid does not straddle y = 0")
    j = below[-1]
    if j + 1 != above[0]:
        raise ConfigurationError("grid rows are not ordered around y = 0")
    return int(j)


def string_gauge(grid: Grid2D, alpha: float) -> GaugeField:
    """Flux alpha concentrated on the half-line {y = 0, x > 0}.

    Only y-links crossing that half-line carry a phase (-alpha); link_x
    is identically zero, so p_x stays gauge invariant.
    """
    link_x = np.zeros((grid.ny, grid.nx - 1))
    link_y = np.zeros((grid.ny - 1, grid.nx))
    j = _string_row(grid)
    link_y[j, grid.x > 0] = -float(alpha)
    return GaugeField(grid, link_x, link_y, alpha=float(alpha), descriptor=DESCRIPTOR_STRING)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_T = 0.5 * (_GL_NODES + 1.0)  # map to [0, 1]
_GL_W = 0.5 * _GL_WEIGHTS


def _segment_min_distance(p0, p1) -> float:
    """Distance from the origin to the segment p0-p1."""
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    denom = float(d @ d)
    t = 0.0 if denom == 0.0 else float(np.clip(-(p0 @ d) / denom, 0.0, 1.0))
    return float(np.hypot(*(p0 + t * d)))


def _core_quadrature(p0, p1, c: float, r0: float) -> float:
    """Line integral of the piecewise symmetric-gauge A along a chord near the core.

    Outside r0 the azimuthal magnitude is c/r; inside it is c*r/r0^2
    (solid rotation), continuous at r0.
    """
    p0 = np.asarray(p0, dtype=float)
    d = np.asarray(p1, dtype=float) - p0
    pts = p0[None, :] + _GL_T[:, None] * d[None, :]
    x, y = pts[:, 0], pts[:, 1]
    r = np.hypot(x, y)
    r = np.maximum(r, 1e-300)
    mag = np.where(r >= r0, c / r, c * r / r0 ** 2)
    # unit azimuthal direction with clockwise-positive circulation: (y, -x)/r
    integrand = mag * (y * d[0] - x * d[1]) / r
    return float(np.sum(_GL_W * integrand))


def symmetric_gauge(grid: Grid2D, alpha: float, core_radius: Optional[float] = None) -> GaugeField:
    """Rotationally symmetric gauge: azimuthal A ~ alpha/(2 pi r) outside a solid-rotation core.

    Link phases are exact chord line integrals away from the core
    (wrapped atan2 differences) and 32-point Gauss-Legendre quadrature
    for chords touching the core disk, so every closed loop outside the
    core encloses exactly alpha.
    """
    r0 = 3.0 * max(grid.dx, grid.dy) if core_radius is None else float(core_radius)
    if r0 < 3.0 * max(grid.dx, grid.dy):
        raise ConfigurationError(f"core radius {r0} under-resolved; need >= 3*max(dx,dy)")
    c = float(alpha) / TWO_PI
    x, y = grid.x, grid.y

    # x-directed links: (x_i, y_j) -> (x_{i+1}, y_j)
    ph_a = np.arctan2(y[:, None], x[None, :-1])
    ph_b = np.arctan2(y[:, None], x[None, 1:])
    dphi = ph_b - ph_a
    dphi -= TWO_PI * np.round(dphi / TWO_PI)
    link_x = -c * dphi
    # y-directed links: (x_i, y_j) -> (x_i, y_{j+1})
    ph_a = np.arctan2(y[:-1, None], x[None, :])
    ph_b = np.arctan2(y[1:, None], x[None, :])
    dphi = ph_b - ph_a
    dphi -= TWO_PI * np.round(dphi / TWO_PI)
    link_y = -c * dphi

    # redo chords that touch the core disk with explicit quadrature
    for j in range(grid.ny):
        if abs(y[j]) > r0:
            continue
        for i in range(grid.nx - 1):
            if _segment_min_distance((x[i], y[j]), (x[i + 1], y[j])) < r0:
                link_x[j, i] = _core_quadrature((x[i], y[j]), (x[i + 1], y[j]), c, r0)
    for j in range(grid.ny - 1):
        if min(abs(y[j]), abs(y[j + 1])) > r0:
            continue
        for i in range(grid.nx):
            if abs(x[i]) > r0:
                continue
            if _segment_min_distance((x[i], y[j]), (x[i], y[j + 1])) < r0:
                link_y[j, i] = _core_quadrature((x[i], y[j]), (x[i], y[j + 1]), c, r0)

    return GaugeField(grid, link_x, link_y, alpha=float(alpha), descriptor=DESCRIPTOR_SYMMETRIC)


def plaquette_flux(gauge: GaugeField, i: int, j: int, with_winding: bool = False):
    """Clockwise sum of the four link phases of plaquette (i, j), wrapped to (-pi, pi].

    With ``with_winding`` the subtracted multiple of 2 pi is returned too.
    """
    grid = gauge.grid
    if not (0 <= i <= grid.nx - 2 and 0 <= j <= grid.ny - 2):
        raise ConfigurationError(f"plaquette ({i}, {j}) is not interior to the grid")
    raw = (gauge.link_y[j, i] + gauge.link_x[j + 1, i]
           - gauge.link_y[j, i + 1] - gauge.link_x[j, i])
    wrapped = raw - TWO_PI * np.round(raw / TWO_PI)
    if wrapped <= -np.pi:
        wrapped += TWO_PI
    winding = int(np.round((raw - wrapped) / TWO_PI))
    return (float(wrapped), winding) if with_winding else float(wrapped)


def total_flux(gauge: GaugeField) -> float:
    """Sum of all plaquette fluxes (windings included) = boundary loop phase."""
    grid = gauge.grid
    return loop_phase(gauge, 0, grid.nx - 1, 0, grid.ny - 1)


def loop_phase(gauge: GaugeField, ilo: int, ihi: int, jlo: int, jhi: int) -> float:
    """Clockwise phase around the lattice rectangle with corner nodes (ilo..ihi, jlo..jhi)."""
    if not (0 <= ilo < ihi <= gauge.grid.nx - 1 and 0 <= jlo < jhi <= gauge.grid.ny - 1):
        raise ConfigurationError("loop corners out of range")
    up_left = float(np.sum(gauge.link_y[jlo:jhi, ilo]))
    top = float(np.sum(gauge.link_x[jhi, ilo:ihi]))
    down_right = float(np.sum(gauge.link_y[jlo:jhi, ihi]))
    bottom = float(np.sum(gauge.link_x[jlo, ilo:ihi]))
    return up_left + top - down_right - bottom


def solenoid_plaquette(grid: Grid2D):
    """(i, j) of the plaquette whose open interior sits right of the origin."""
    j = _string_row(grid)
    above = np.nonzero(grid.x > 0)[0]
    if len(above) == 0 or above[0] == 0:
        raise ConfigurationError("grid does not straddle x = 0")
    return int(above[0] - 1), j


def gauge_transform(f: WaveField, gauge: GaugeField, chi: GaugeFunction):
    """Apply amp -> exp(i chi) amp and shift link phases by node differences of chi.

    Node differences are taken raw, so a chi with a branch cut moves the
    corresponding flux string onto the links crossing the cut.  All
    gauge-invariant observables are unchanged.
    """
    if f.grid != gauge.grid or chi.grid != gauge.grid:
        raise ConfigurationError("field, gauge, and gauge function must share a grid")
    v = chi.values
    amp = np.exp(1j * v) * f.amp
    dx_chi = v[:, 1:] - v[:, :-1]
    dy_chi = v[1:, :] - v[:-1, :]
    if not dx_chi.any() and not dy_chi.any():
        return WaveField(f.grid, amp), gauge
    new_gauge = GaugeField(gauge.grid, gauge.link_x + dx_chi, gauge.link_y + dy_chi,
                           alpha=gauge.alpha, descriptor=DESCRIPTOR_TRANSFORMED)
    return WaveField(f.grid, amp), new_gauge


def angle_gauge_function(grid: Grid2D, alpha: float) -> GaugeFunction:
    """chi = (alpha / 2 pi) * polar angle in [0, 2 pi), cut along {y = 0, x > 0}.

    Transforms symmetric_gauge(alpha) into string_gauge(alpha) outside
    the solenoid core.
    """
    X, Y = grid.meshgrid()
    phi = np.arctan2(Y, X)
    phi[phi < 0] += TWO_PI
    return GaugeFunction(grid, (alpha / TWO_PI) * phi, cut="half-line y=0, x>0")


def quantized_flux_values(k_max: int):
    """Superconducting-shield flux values alpha = pi*k for k = 0..k_max."""
    if k_max < 1:
        raise ConfigurationError("k_max must be >= 1")
    return [np.pi * k for k in range(k_max + 1)]
