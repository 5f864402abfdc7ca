"""Discrete Leray-Helmholtz projection on collocated cell averages."""

from __future__ import annotations

from .fvops import div, grad, wall_normal
from .grid import EXTRAPOLATE, NEUMANN_ZERO, CellField, VectorBc, VectorField
from .linsolve import EllipticSolver


def project(w: VectorField, solver: EllipticSolver | None = None, tol: float = 1e-12,
            bc: VectorBc | None = None) -> tuple[VectorField, CellField]:
    """Split ``w`` as ``u - grad(phi)`` with u approximately solenoidal.

    phi solves L phi = -D w with n.grad(phi) = -n.w on the walls, where the
    wall normal velocity is reconstructed under ``bc``. The default one-sided
    extrapolation assumes nothing about w at the walls; pass the electric
    conditions when w is known to satisfy them. Because the same wall faces
    enter D w, the Neumann problem is compatible up to round-off.
    """
    bc = bc or VectorBc.same(EXTRAPOLATE)
    solver = solver or EllipticSolver(w.grid)
    normal = wall_normal(w, bc)
    data = {wall: -vals for wall, vals in normal.items()}
    phi, _ = solver.solve_poisson_neumann(-div(w, bc), data, tol)
    u = w + grad(phi, NEUMANN_ZERO.with_data(data))
    return u, phi


def project_repeatedly(w: VectorField, times: int, solver: EllipticSolver | None = None,
                       tol: float = 1e-12, bc: VectorBc | None = None) -> VectorField:
    solver = solver or EllipticSolver(w.grid)
    for _ in range(times):
        w, _ = project(w, solver, tol, bc)
    return w
