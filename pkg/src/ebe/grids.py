"""Sampling grids and finite-difference stencils.

Two grid flavors cover every solver in the package:

* ``AxiGrid``: an axisymmetric half-strip in (r, y), r > 0 and y > 0, for
  model profiles and the scalar reduction.  Non-periodic in both directions.
* ``TorusGrid``: periodic x2, x3 on [0, P)^2 times a y-interval, carrying the
  product metric g0^2 |dz|^2 + dy^2.

Derivatives use 4th-order centered stencils in the interior and fall back to
2nd-order (centered one node in, one-sided at the edge) near non-periodic
boundaries, so sup-norm truncation is O(h^2) boundary-limited.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


def worker_count() -> int:
    """Worker cap for embarrassingly parallel loops, from BOGO_THREADS."""
    cap = os.environ.get("BOGO_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def _check_uniform(x: np.ndarray, name: str) -> float:
    dx = np.diff(x)
    if len(dx) == 0 or np.any(dx <= 0):
        raise ValueError(f"{name}-samples must be strictly increasing")
    if np.max(np.abs(dx - dx[0])) > 1e-12 * abs(dx[0]):
        raise ValueError(f"{name}-samples must be uniformly spaced")
    return float(dx[0])


@dataclass(frozen=True)
class AxiGrid:
    """Uniform tensor grid on [r_min, r_max] x [y_min, y_max], both > 0."""

    r: np.ndarray
    y: np.ndarray
    dr: float = field(init=False)
    dy: float = field(init=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if r.size < 4 or y.size < 4:
            raise ValueError("need at least 4 samples per axis")
        if r[0] <= 0 or y[0] <= 0:
            raise ValueError("grid must stay away from r=0 and y=0")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "dr", _check_uniform(r, "r"))
        object.__setattr__(self, "dy", _check_uniform(y, "y"))

    @classmethod
    def regular(cls, nr: int, ny: int, rmin: float, rmax: float,
                ymin: float, ymax: float) -> "AxiGrid":
        return cls(np.linspace(rmin, rmax, nr), np.linspace(ymin, ymax, ny))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.r.size, self.y.size)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.r, self.y, indexing="ij")

    def refine(self) -> "AxiGrid":
        """Nested refinement: halve spacing, keep endpoints and all nodes."""
        return AxiGrid.regular(2 * self.r.size - 1, 2 * self.y.size - 1,
                               self.r[0], self.r[-1], self.y[0], self.y[-1])


@dataclass(frozen=True)
class TorusGrid:
    """Periodic x2, x3 on [0, period)^2 with a y-interval and conformal factor."""

    nx: int
    ny_axis: int
    ny: int
    period: float
    ymin: float
    ymax: float
    g0: float = 1.0

    def __post_init__(self):
        if self.nx < 4 or self.ny_axis < 4 or self.ny < 4:
            raise ValueError("need at least 4 samples per axis")
        if self.period <= 0 or self.g0 <= 0:
            raise ValueError("period and g0 must be positive")
        if not (0 < self.ymin < self.ymax):
            raise ValueError("require 0 < ymin < ymax")

    @classmethod
    def regular(cls, nx: int, ny: int, period: float, ymin: float, ymax: float,
                g0: float = 1.0) -> "TorusGrid":
        return cls(nx=nx, ny_axis=nx, ny=ny, period=period, ymin=ymin,
                   ymax=ymax, g0=g0)

    @property
    def x2(self) -> np.ndarray:
        return np.arange(self.nx) * (self.period / self.nx)

    @property
    def x3(self) -> np.ndarray:
        return np.arange(self.ny_axis) * (self.period / self.ny_axis)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.ymin, self.ymax, self.ny)

    @property
    def hx(self) -> float:
        return self.period / self.nx

    @property
    def hy(self) -> float:
        return (self.ymax - self.ymin) / (self.ny - 1)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny_axis, self.ny)

    def mesh(self):
        return np.meshgrid(self.x2, self.x3, self.y, indexing="ij")


def diff_periodic(f: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    """First derivative along a periodic axis (4th- or 2nd-order centered)."""
    r1 = np.roll(f, -1, axis=axis)
    l1 = np.roll(f, 1, axis=axis)
    if order == 2:
        return (r1 - l1) / (2.0 * h)
    r2 = np.roll(f, -2, axis=axis)
    l2 = np.roll(f, 2, axis=axis)
    return (8.0 * (r1 - l1) - (r2 - l2)) / (12.0 * h)


def diff_bounded(f: np.ndarray, h: float, axis: int, order: int = 4) -> np.ndarray:
    """First derivative along a non-periodic axis.

    Interior: centered 4th order (or 2nd if requested).  The two rows nearest
    each edge drop to 2nd order: centered one node in, one-sided 3-point at
    the boundary itself.
    """
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    out = np.empty_like(f)
    if order >= 4 and n >= 5:
        out[2:-2] = (8.0 * (f[3:-1] - f[1:-3]) - (f[4:] - f[:-4])) / (12.0 * h)
        out[1] = (f[2] - f[0]) / (2.0 * h)
        out[-2] = (f[-1] - f[-3]) / (2.0 * h)
    else:
        out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def diff2_bounded(f: np.ndarray, h: float, axis: int, order: int = 2) -> np.ndarray:
    """Second derivative along a non-periodic axis (centered; one-sided edges)."""
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    out = np.empty_like(f)
    h2 = h * h
    if order >= 4 and n >= 6:
        out[2:-2] = (-(f[4:] + f[:-4]) + 16.0 * (f[3:-1] + f[1:-3])
                     - 30.0 * f[2:-2]) / (12.0 * h2)
        out[1] = (f[2] - 2.0 * f[1] + f[0]) / h2
        out[-2] = (f[-1] - 2.0 * f[-2] + f[-3]) / h2
    else:
        out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h2
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h2
    return np.moveaxis(out, 0, axis)


def sup_norm(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def l2_norm(x: np.ndarray, cell: float = 1.0) -> float:
    """Discrete L2 norm with uniform cell weight (fixed summation order)."""
    flat = np.abs(np.asarray(x)).ravel()
    return float(np.sqrt(np.sum(flat * flat) * cell))
