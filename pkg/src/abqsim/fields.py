"""Spatial grids and complex wave fields.

Units are hbar = m = 1 throughout. Fields are stored row-major with the
y index outermost: ``amp[j, i]`` is the value at ``(x0 + i*dx, y0 + j*dy)``.
All field objects are immutable after construction; every operation
returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular lattice; node i has x = x0 + i*dx, exactly."""

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise ConfigurationError(f"grid must be at least 16x16, got {self.nx}x{self.ny}")
        if self.dx <= 0 or self.dy <= 0:
            raise ConfigurationError(f"grid spacings must be positive, got dx={self.dx}, dy={self.dy}")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny) * self.dy

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def meshgrid(self):
        """(X, Y) arrays of shape (ny, nx)."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def shape(self):
        return (self.ny, self.nx)


def make_grid(nx, ny, dx, dy, x0, y0) -> Grid2D:
    """Construct a validated Grid2D."""
    return Grid2D(int(nx), int(ny), float(dx), float(dy), float(x0), float(y0))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex amplitude per grid node, shape (ny, nx)."""

    grid: Grid2D
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.amp.shape != self.grid.shape():
            raise ConfigurationError(
                f"amplitude shape {self.amp.shape} does not match grid {self.grid.shape()}")
        object.__setattr__(self, "amp", _freeze(np.ascontiguousarray(self.amp, dtype=np.complex128)))

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2) * self.grid.cell_area)

    def normalized(self) -> "WaveField":
        n2 = self.norm_squared()
        if n2 <= 0.0 or not np.isfinite(n2):
            raise ConfigurationError(f"cannot normalize field with squared norm {n2}")
        return WaveField(self.grid, self.amp / np.sqrt(n2))

    def with_amp(self, amp: np.ndarray) -> "WaveField":
        return WaveField(self.grid, amp)


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(np.ascontiguousarray(self.values, dtype=np.float64)))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_area)


@dataclass(frozen=True, eq=False)
class VectorField:
    grid: Grid2D
    vx: np.ndarray = field(repr=False)
    vy: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vx", _freeze(np.ascontiguousarray(self.vx, dtype=np.float64)))
        object.__setattr__(self, "vy", _freeze(np.ascontiguousarray(self.vy, dtype=np.float64)))

    def integral(self):
        a = self.grid.cell_area
        return float(np.sum(self.vx) * a), float(np.sum(self.vy) * a)


def _check_boundary_tail(envelope: np.ndarray, rel: float = 1e-10):
    """Largest boundary magnitude relative to the peak must stay below rel."""
    peak = float(np.max(envelope))
    edge = max(
        float(np.max(envelope[0, :])), float(np.max(envelope[-1, :])),
        float(np.max(envelope[:, 0])), float(np.max(envelope[:, -1])),
    )
    if peak <= 0.0:
        raise ConfigurationError("packet envelope is identically zero on the grid")
    if edge > rel * peak:
        raise ConfigurationError(
            f"packet tail at grid boundary is {edge / peak:.3e} of the peak (limit {rel:.0e}); "
            "enlarge the domain or shrink the packet")


def gaussian_packet(grid: Grid2D, center, sigma: float, momentum=(0.0, 0.0)) -> WaveField:
    """Normalized Gaussian packet exp(-r^2/(4 sigma^2)) exp(i k.r).

    sigma is the position-space standard deviation of each coordinate.
    """
    xc, yc = center
    kx, ky = momentum
    if sigma <= 2.0 * max(grid.dx, grid.dy):
        raise ConfigurationError(
            f"sigma={sigma} is not resolvable on spacings ({grid.dx}, {grid.dy}); need sigma > 2*max(dx,dy)")
    X, Y = grid.meshgrid()
    envelope = np.exp(-((X - xc) ** 2 + (Y - yc) ** 2) / (4.0 * sigma ** 2))
    _check_boundary_tail(envelope)
    amp = envelope * np.exp(1j * (kx * X + ky * Y))
    return WaveField(grid, amp).normalized()


def bump_profile(rsq: np.ndarray, radius: float) -> np.ndarray:
    """Compactly supported bump exp(-1/(a^2 - r^2)) inside r < a, exactly 0 outside."""
    rsq = np.asarray(rsq, dtype=np.float64)
    out = np.zeros_like(rsq)
    inside = rsq < radius ** 2
    out[inside] = np.exp(-1.0 / (radius ** 2 - rsq[inside]))
    return out


def bump_packet(grid: Grid2D, center, radius: float) -> WaveField:
    """Normalized radial bump packet with bit-exact zero support outside the radius."""
    xc, yc = center
    if radius <= 4.0 * max(grid.dx, grid.dy):
        raise ConfigurationError(
            f"bump radius {radius} under-resolved on spacings ({grid.dx}, {grid.dy})")
    X, Y = grid.meshgrid()
    env = bump_profile((X - xc) ** 2 + (Y - yc) ** 2, radius)
    _check_boundary_tail(env)
    return WaveField(grid, env.astype(np.complex128)).normalized()


def superpose(f1: WaveField, f2: WaveField, w1: float = 1.0, w2: float = 1.0,
              relative_phase: float = 0.0) -> WaveField:
    """Normalized w1*f1 + w2*exp(i beta)*f2 on a shared grid.

    A combination that interferes away essentially all of its norm
    (below 1e-12 of the weight scale) is rejected as a zero field.
    """
    if f1.grid != f2.grid:
        raise ConfigurationError("superpose requires both fields on the same grid")
    amp = w1 * f1.amp + (w2 * np.exp(1j * relative_phase)) * f2.amp
    out = WaveField(f1.grid, amp)
    scale = (w1 ** 2 + w2 ** 2) * max(f1.norm_squared(), f2.norm_squared())
    if out.norm_squared() < 1e-12 * scale:
        raise ConfigurationError("superposition is destructively zero")
    return out.normalized()
