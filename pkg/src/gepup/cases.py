"""Benchmark case definitions: single vortex, viscous box, manufactured flow."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .fvops import init_cell_averages
from .grid import ConfigurationError, Grid, VectorField, build_grid
from .linsolve import EllipticSolver
from .projection import project_repeatedly

VORTEX_R = 0.2
VORTEX_GAMMA = 1.0
VORTEX_UMAX = VORTEX_GAMMA * (0.5 * VORTEX_R - 4.0 * VORTEX_R ** 3)


@dataclass(frozen=True)
class CaseSpec:
    name: str
    nu: float
    lam: float = 1.0
    cr: float = 0.5
    t0: float = 0.0
    te: float = 0.5
    n: int = 64
    projections: int = 0
    u_max: float = 1.0
    k: Optional[float] = None        # overrides the Courant-number step
    decay: float = 1.0               # manufactured case only
    profile: str = "box"             # manufactured case only

    def __post_init__(self):
        if self.nu <= 0:
            raise ConfigurationError("nu must be positive")
        if self.lam < 0:
            raise ConfigurationError("lambda must be non-negative")
        if self.te < self.t0:
            raise ConfigurationError("te must not precede t0")
        if self.name not in CASES:
            raise ConfigurationError(f"unknown case {self.name!r}")
        if self.profile not in MANUFACTURED_PROFILES:
            raise ConfigurationError(f"unknown manufactured profile {self.profile!r}")

    def grid(self) -> Grid:
        return build_grid(self.n, self.n)

    def time_step(self) -> float:
        if self.k is not None:
            return self.k
        return self.cr * (1.0 / self.n) / self.u_max

    def with_(self, **kw) -> "CaseSpec":
        return replace(self, **kw)


def vortex_speed(rv):
    rv = np.asarray(rv, dtype=float)
    R, G = VORTEX_R, VORTEX_GAMMA
    inner = G * (0.5 * rv - 4.0 * rv ** 3)
    safe = np.where(rv > 0, rv, 1.0)
    outer = G * (R / safe) * (0.5 * R - 4.0 * R ** 3)
    return np.where(rv < R, inner, outer)


def single_vortex_velocity(x, y):
    dx, dy = x - 0.5, y - 0.5
    rv = np.hypot(dx, dy)
    ut = vortex_speed(rv)
    safe = np.where(rv > 0, rv, 1.0)
    return (-ut * dy / safe, ut * dx / safe)


def viscous_box_velocity(x, y):
    sx, sy = np.sin(np.pi * x), np.sin(np.pi * y)
    return (sx * sx * np.sin(2 * np.pi * y), -np.sin(2 * np.pi * x) * sy * sy)


def init_single_vortex(grid: Grid, projections: int = 10,
                       solver: EllipticSolver | None = None) -> VectorField:
    u = init_cell_averages(single_vortex_velocity, grid)
    return project_repeatedly(u, projections, solver)


def init_viscous_box(grid: Grid) -> VectorField:
    return init_cell_averages(viscous_box_velocity, grid)


MANUFACTURED_PROFILES = ("box", "poly")


class Manufactured:
    """u*(x, t) = exp(-decay t) * a fixed solenoidal no-slip profile.

    ``profile="box"`` uses the viscous-box field with p* = 0. ``"poly"`` uses
    the curl of 64 x^2 (1-x)^2 y^2 (1-y)^2 (1 + x + 2y), which has no mirror
    symmetry about the walls, with p* = cos(pi x) cos(pi y). The forcing
    g = du*/dt + u*.grad u* + grad p* - nu Lap u* is derived symbolically
    once and compiled to numpy.
    """

    def __init__(self, nu: float, decay: float = 1.0, profile: str = "box"):
        import sympy as s

        if profile not in MANUFACTURED_PROFILES:
            raise ConfigurationError(f"unknown manufactured profile {profile!r}")
        x, y, t = s.symbols("x y t")
        amp = s.exp(-decay * t)
        if profile == "box":
            ux = amp * s.sin(s.pi * x) ** 2 * s.sin(2 * s.pi * y)
            uy = -amp * s.sin(2 * s.pi * x) * s.sin(s.pi * y) ** 2
            p = s.Integer(0)
        else:
            psi = 64 * x ** 2 * (1 - x) ** 2 * y ** 2 * (1 - y) ** 2 * (1 + x + 2 * y)
            ux = amp * s.diff(psi, y)
            uy = -amp * s.diff(psi, x)
            p = amp * s.cos(s.pi * x) * s.cos(s.pi * y)
        gx = (s.diff(ux, t) + ux * s.diff(ux, x) + uy * s.diff(ux, y) + s.diff(p, x)
              - nu * (s.diff(ux, x, 2) + s.diff(ux, y, 2)))
        gy = (s.diff(uy, t) + ux * s.diff(uy, x) + uy * s.diff(uy, y) + s.diff(p, y)
              - nu * (s.diff(uy, x, 2) + s.diff(uy, y, 2)))
        self.nu, self.decay, self.profile = nu, decay, profile
        self._u = s.lambdify((x, y, t), (ux, uy), "numpy")
        self._p = s.lambdify((x, y, t), p, "numpy")
        self._g = s.lambdify((x, y, t), (gx, gy), "numpy")

    def velocity(self, x, y, t):
        ux, uy = self._u(x, y, t)
        return (np.broadcast_to(ux, np.shape(x)), np.broadcast_to(uy, np.shape(x)))

    def pressure(self, x, y, t):
        return np.broadcast_to(self._p(x, y, t), np.shape(x)) * 1.0

    def forcing(self, x, y, t):
        gx, gy = self._g(x, y, t)
        return (np.broadcast_to(gx, np.shape(x)) * 1.0, np.broadcast_to(gy, np.shape(x)) * 1.0)

    def cell_averages(self, grid: Grid, t: float) -> VectorField:
        return init_cell_averages(lambda x, y: self.velocity(x, y, t), grid)


def init_manufactured(grid: Grid, nu: float, decay: float = 1.0, t0: float = 0.0,
                      profile: str = "box"):
    m = Manufactured(nu, decay, profile)
    return m.cell_averages(grid, t0), m.forcing


def single_vortex(n: int = 128, **kw) -> CaseSpec:
    base = dict(nu=3.4e-6, lam=1.0, cr=0.5, t0=0.0, te=60.0, n=n, projections=10,
                u_max=VORTEX_UMAX)
    base.update(kw)
    return CaseSpec("single_vortex", **base)


def viscous_box(n: int = 64, re: float = 1e4, **kw) -> CaseSpec:
    # nu = U_ref L_ref / Re with U_ref = max initial speed = 1 and L_ref = 1
    base = dict(nu=1.0 / re, lam=1.0, cr=0.5, t0=0.0, te=0.5, n=n, u_max=1.0)
    base.update(kw)
    return CaseSpec("viscous_box", **base)


def manufactured(n: int = 32, nu: float = 0.01, **kw) -> CaseSpec:
    base = dict(nu=nu, lam=1.0, cr=0.5, t0=0.0, te=0.1, n=n, u_max=1.0)
    base.update(kw)
    return CaseSpec("manufactured", **base)


CASES = ("single_vortex", "viscous_box", "manufactured")


def initial_condition(case: CaseSpec, grid: Grid, solver: EllipticSolver | None = None):
    """Initial cell-averaged velocity and forcing closure (or None)."""
    if case.name == "single_vortex":
        return init_single_vortex(grid, case.projections, solver), None
    if case.name == "viscous_box":
        u = init_viscous_box(grid)
        if case.projections:
            u = project_repeatedly(u, case.projections, solver)
        return u, None
    if case.name == "manufactured":
        return init_manufactured(grid, case.nu, case.decay, case.t0, case.profile)
    raise ConfigurationError(f"unknown case {case.name!r}")


CaseFactory = Callable[..., CaseSpec]
