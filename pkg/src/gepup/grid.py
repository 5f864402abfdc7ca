"""Uniform rectangular grids, cell-averaged fields and ghost-cell filling.

Fields are stored as padded arrays of shape ``(nx + 2g, ny + 2g)`` indexed
``[i, j]`` with ``i`` along x. Ghost layers are filled from a quartic fit in
the wall-normal direction through four interior cell averages and one
boundary datum (value, normal derivative) or, for ``EXTRAPOLATE``, through
five interior cell averages.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

WALLS = ("xlo", "xhi", "ylo", "yhi")


class ConfigurationError(ValueError):
    """Raised for inconsistent grid, tableau or case configuration."""


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    h: float
    origin: tuple[float, float] = (0.0, 0.0)
    n_ghost: int = 2

    @property
    def extent(self) -> tuple[float, float]:
        return (self.nx * self.h, self.ny * self.h)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def padded_shape(self) -> tuple[int, int]:
        g = self.n_ghost
        return (self.nx + 2 * g, self.ny + 2 * g)

    @property
    def interior(self) -> tuple[slice, slice]:
        g = self.n_ghost
        return (slice(g, g + self.nx), slice(g, g + self.ny))

    @property
    def cell_volume(self) -> float:
        return self.h * self.h

    def centers(self, axis: int) -> np.ndarray:
        n = self.nx if axis == 0 else self.ny
        return self.origin[axis] + (np.arange(n) + 0.5) * self.h

    def faces(self, axis: int) -> np.ndarray:
        n = self.nx if axis == 0 else self.ny
        return self.origin[axis] + np.arange(n + 1) * self.h

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.centers(0), self.centers(1), indexing="ij")

    def refine(self) -> "Grid":
        return Grid(2 * self.nx, 2 * self.ny, self.h / 2, self.origin, self.n_ghost)

    def wall_length(self, wall: str) -> int:
        return self.ny if wall in ("xlo", "xhi") else self.nx


def build_grid(nx: int, ny: int, origin=(0.0, 0.0), extent=(1.0, 1.0),
               n_ghost: int = 2) -> Grid:
    if nx <= 0 or ny <= 0:
        raise ConfigurationError(f"cell counts must be positive, got {nx}x{ny}")
    if n_ghost < 2:
        raise ConfigurationError("at least two ghost layers are required")
    if min(nx, ny) < 5:
        raise ConfigurationError("boundary closures need at least 5 cells per axis")
    hx = extent[0] / nx
    hy = extent[1] / ny
    if not np.isclose(hx, hy, rtol=1e-12, atol=0.0):
        raise ConfigurationError(f"non-square cells: hx={hx!r}, hy={hy!r}")
    return Grid(int(nx), int(ny), float(hx), (float(origin[0]), float(origin[1])),
                int(n_ghost))


class Kind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    EXTRAPOLATE = "extrapolate"


@dataclass(frozen=True, eq=False)
class WallBc:
    """Condition on one wall. ``data`` holds face averages along the wall
    (wall value for Dirichlet, outward normal derivative for Neumann);
    ``None`` means homogeneous."""

    kind: Kind
    data: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class BcSpec:
    xlo: WallBc
    xhi: WallBc
    ylo: WallBc
    yhi: WallBc

    @classmethod
    def uniform(cls, kind: Kind) -> "BcSpec":
        w = WallBc(kind)
        return cls(w, w, w, w)

    def wall(self, name: str) -> WallBc:
        return getattr(self, name)

    @property
    def kinds(self) -> tuple[Kind, Kind, Kind, Kind]:
        return tuple(self.wall(w).kind for w in WALLS)

    def homogeneous(self) -> "BcSpec":
        return BcSpec(*(WallBc(k) for k in self.kinds))

    def with_data(self, data: dict[str, np.ndarray]) -> "BcSpec":
        walls = {w: self.wall(w) for w in WALLS}
        for name, d in data.items():
            walls[name] = WallBc(walls[name].kind, np.asarray(d, dtype=float))
        return BcSpec(**walls)


DIRICHLET_ZERO = BcSpec.uniform(Kind.DIRICHLET)
NEUMANN_ZERO = BcSpec.uniform(Kind.NEUMANN)
EXTRAPOLATE = BcSpec.uniform(Kind.EXTRAPOLATE)


@dataclass(frozen=True, eq=False)
class VectorBc:
    x: BcSpec
    y: BcSpec

    def __iter__(self):
        return iter((self.x, self.y))

    def __getitem__(self, d: int) -> BcSpec:
        return (self.x, self.y)[d]

    @classmethod
    def same(cls, bc: BcSpec) -> "VectorBc":
        return cls(bc, bc)


def electric_bc() -> VectorBc:
    """Tangential component Dirichlet-0, normal component Neumann-0."""
    d, n = WallBc(Kind.DIRICHLET), WallBc(Kind.NEUMANN)
    return VectorBc(BcSpec(n, n, d, d), BcSpec(d, d, n, n))


def noslip_bc() -> VectorBc:
    return VectorBc.same(DIRICHLET_ZERO)


def _cell_moments(j: int) -> np.ndarray:
    """Average of xi**m over [j, j+1] for m = 0..4."""
    m = np.arange(5)
    return ((j + 1.0) ** (m + 1) - float(j) ** (m + 1)) / (m + 1)


@lru_cache(maxsize=None)
def ghost_weights(kind: Kind, n_ghost: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights giving ghost averages from interior averages near a wall.

    Coordinates are in cell widths, increasing into the domain with the wall
    at 0. Returns ``(W, d)`` with ``ghost[m] = W[m] @ f[:5] + d[m] * datum``
    for ghost layer ``m`` (0 is adjacent to the wall). For Neumann the datum
    is the inward derivative scaled by ``h``.
    """
    if kind is Kind.EXTRAPOLATE:
        rows = [_cell_moments(j) for j in range(5)]
    else:
        datum = np.zeros(5)
        datum[0 if kind is Kind.DIRICHLET else 1] = 1.0
        rows = [_cell_moments(j) for j in range(4)] + [datum]
    inv = np.linalg.inv(np.array(rows))
    ghosts = np.array([_cell_moments(-1 - m) for m in range(n_ghost)]) @ inv
    W = np.zeros((n_ghost, 5))
    d = np.zeros(n_ghost)
    if kind is Kind.EXTRAPOLATE:
        W[:] = ghosts
    else:
        W[:, :4] = ghosts[:, :4]
        d[:] = ghosts[:, 4]
    W.setflags(write=False)
    d.setflags(write=False)
    return W, d


@lru_cache(maxsize=None)
def wall_second_derivative_weights() -> np.ndarray:
    """Weights on the first four cell averages giving the second normal
    derivative at a wall where the first normal derivative vanishes, from
    the same quartic fit as the Neumann ghost fill (cell-width units)."""
    rows = [_cell_moments(j) for j in range(4)] + [np.array([0.0, 1.0, 0.0, 0.0, 0.0])]
    w = 2.0 * np.linalg.inv(np.array(rows))[2, :4]
    w.setflags(write=False)
    return w


def _datum_scale(kind: Kind, h: float) -> float:
    # outward normal derivative -> inward derivative in cell-width units
    return -h if kind is Kind.NEUMANN else 1.0


def _fill_axis(a: np.ndarray, axis: int, n: int, g: int, lo: WallBc, hi: WallBc,
               h: float, span: slice, pad_data: bool) -> None:
    """Fill ghost layers of padded array ``a`` along ``axis`` in place, over
    the transverse index range ``span``."""
    b = np.moveaxis(a, axis, 0)
    for wall, side in ((lo, 0), (hi, 1)):
        W, d = ghost_weights(wall.kind, g)
        if side == 0:
            inner = b[g:g + 5, span]
        else:
            inner = b[g + n - 1:g + n - 6:-1, span]
        datum = 0.0
        if wall.data is not None and wall.kind is not Kind.EXTRAPOLATE:
            data = np.asarray(wall.data, dtype=float)
            if pad_data:
                data = np.pad(data, g, mode="edge")
            datum = _datum_scale(wall.kind, h) * data
        for m in range(g):
            val = np.tensordot(W[m], inner, axes=(0, 0)) + d[m] * datum
            if side == 0:
                b[g - 1 - m, span] = val
            else:
                b[g + n + m, span] = val


@dataclass
class CellField:
    """Cell averages on a grid, stored with ghost layers."""

    grid: Grid
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.data.shape != self.grid.padded_shape:
            raise ValueError(f"data shape {self.data.shape} does not match "
                             f"grid {self.grid.padded_shape}")

    @classmethod
    def zeros(cls, grid: Grid) -> "CellField":
        return cls(grid, np.zeros(grid.padded_shape))

    @classmethod
    def from_interior(cls, grid: Grid, values) -> "CellField":
        f = cls.zeros(grid)
        f.data[grid.interior] = values
        return f

    @property
    def interior(self) -> np.ndarray:
        return self.data[self.grid.interior]

    def copy(self) -> "CellField":
        return CellField(self.grid, self.data.copy())

    def _wrap(self, data) -> "CellField":
        return CellField(self.grid, data)

    def __add__(self, other):
        return self._wrap(self.data + _raw(other))

    def __sub__(self, other):
        return self._wrap(self.data - _raw(other))

    def __mul__(self, s):
        return self._wrap(self.data * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self._wrap(self.data / s)

    def __neg__(self):
        return self._wrap(-self.data)


@dataclass
class VectorField:
    x: CellField
    y: CellField

    def __post_init__(self):
        if self.x.grid != self.y.grid:
            raise ValueError("vector components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.x.grid

    @property
    def components(self) -> tuple[CellField, CellField]:
        return (self.x, self.y)

    def __iter__(self):
        return iter((self.x, self.y))

    def __getitem__(self, d: int) -> CellField:
        return self.components[d]

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(CellField.zeros(grid), CellField.zeros(grid))

    @classmethod
    def from_interior(cls, grid: Grid, vx, vy) -> "VectorField":
        return cls(CellField.from_interior(grid, vx), CellField.from_interior(grid, vy))

    @property
    def interior(self) -> np.ndarray:
        """Stacked interior values, shape (2, nx, ny)."""
        return np.stack([self.x.interior, self.y.interior])

    def copy(self) -> "VectorField":
        return VectorField(self.x.copy(), self.y.copy())

    def __add__(self, o):
        return VectorField(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return VectorField(self.x - o.x, self.y - o.y)

    def __mul__(self, s):
        return VectorField(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return VectorField(self.x / s, self.y / s)

    def __neg__(self):
        return VectorField(-self.x, -self.y)


def _raw(other):
    return other.data if isinstance(other, CellField) else other


def fill_ghosts(f: CellField, bc: BcSpec) -> CellField:
    """Return a copy of ``f`` with every ghost cell set from ``bc``.

    x-wall ghosts are filled on interior rows first; y-wall ghosts are then
    filled on all columns, which also sets the corners.
    """
    grid = f.grid
    g = grid.n_ghost
    out = f.data.copy()
    _fill_axis(out, 0, grid.nx, g, bc.xlo, bc.xhi, grid.h,
               slice(g, g + grid.ny), pad_data=False)
    _fill_axis(out, 1, grid.ny, g, bc.ylo, bc.yhi, grid.h,
               slice(None), pad_data=True)
    return CellField(grid, out)


def fill_vector_ghosts(v: VectorField, bc: VectorBc) -> VectorField:
    return VectorField(fill_ghosts(v.x, bc.x), fill_ghosts(v.y, bc.y))
