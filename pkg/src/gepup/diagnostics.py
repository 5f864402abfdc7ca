"""Scalar diagnostics, Richardson error estimates and observed orders."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import fvops
from .grid import CellField, Grid, VectorField, electric_bc


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E_h: float
    sav_dev: float
    div_l1: float
    div_l2: float
    div_linf: float
    wall_normal_max: float
    kinetic: float

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_row(self) -> list[float]:
        return [getattr(self, n) for n in self.names()]

    def as_dict(self) -> dict:
        return asdict(self)


def record(state) -> DiagnosticsRecord:
    bc = electric_bc()
    kinetic = 0.5 * fvops.inner_product(state.U, state.U)
    dW = fvops.div(state.W, bc)
    normal = fvops.wall_normal(state.W, bc)
    wall_max = max(float(np.max(np.abs(v))) for v in normal.values())
    return DiagnosticsRecord(
        t=float(state.t),
        E_h=kinetic + 0.5 * state.r ** 2,
        sav_dev=abs(state.r - 1.0),
        div_l1=fvops.norm(dW, 1),
        div_l2=fvops.norm(dW, 2),
        div_linf=fvops.norm(dW, np.inf),
        wall_normal_max=wall_max,
        kinetic=kinetic,
    )


def coarsen(f):
    """Average 2x2 blocks of a field onto the grid with twice the spacing."""
    if isinstance(f, VectorField):
        return VectorField(coarsen(f.x), coarsen(f.y))
    g = f.grid
    if g.nx % 2 or g.ny % 2:
        raise ValueError("only even grids can be coarsened")
    coarse = Grid(g.nx // 2, g.ny // 2, 2 * g.h, g.origin, g.n_ghost)
    a = f.interior
    avg = 0.25 * (a[0::2, 0::2] + a[1::2, 0::2] + a[0::2, 1::2] + a[1::2, 1::2])
    return CellField.from_interior(coarse, avg)


def richardson_error(coarse, fine, p: float = 2) -> float:
    """Norm of coarse minus the block-averaged fine solution."""
    cg, fg = coarse.grid, fine.grid
    if fg.nx != 2 * cg.nx or fg.ny != 2 * cg.ny or not math.isclose(fg.h * 2, cg.h):
        raise ValueError("fine grid must be an exact 2x refinement of the coarse grid")
    return fvops.norm(coarse - _regrid(coarsen(fine), cg), p)


def _regrid(f, grid: Grid):
    if isinstance(f, VectorField):
        return VectorField(_regrid(f.x, grid), _regrid(f.y, grid))
    return CellField.from_interior(grid, f.interior)


def observed_order(e_coarse: float, e_fine: float) -> float:
    return math.log2(e_coarse / e_fine)
