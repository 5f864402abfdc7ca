"""Fourth-order finite-volume operators on cell averages.

Every operator fills the ghost layers it needs from the supplied boundary
conditions, so callers pass interior data plus a :class:`BcSpec`.
Results are returned as fields with unset (zero) ghosts.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .grid import (EXTRAPOLATE, BcSpec, CellField, Grid, Kind, VectorBc, VectorField,
                   electric_bc, fill_ghosts, fill_vector_ghosts, ghost_weights,
                   wall_second_derivative_weights)

BOOLE_WEIGHTS = np.array([7.0, 32.0, 12.0, 32.0, 7.0]) / 90.0


def _shift(a: np.ndarray, axis: int, k: int, g: int, n: int, extra: int = 0):
    """Slice of padded array ``a`` covering interior (plus ``extra`` trailing
    entries) shifted by ``k`` along ``axis``; interior along the other axis."""
    sl = [slice(g, a.shape[0] - g), slice(g, a.shape[1] - g)]
    sl[axis] = slice(g + k, g + k + n + extra)
    return a[tuple(sl)]


def _faces(f: CellField, bc: BcSpec | None, axis: int, weights, offsets):
    grid = f.grid
    a = fill_ghosts(f, bc).data if bc is not None else f.data
    n = grid.nx if axis == 0 else grid.ny
    g = grid.n_ghost
    out = 0.0
    for w, k in zip(weights, offsets):
        out = out + w * _shift(a, axis, k, g, n, extra=1)
    return out


def face_interp(f: CellField, axis: int, bc: BcSpec | None = None) -> np.ndarray:
    """Face averages on faces normal to ``axis``; shape (nx+1, ny) or (nx, ny+1).

    Face ``i`` sits between cells ``i-1`` and ``i``. Pass ``bc=None`` if the
    ghosts of ``f`` are already filled.
    """
    return _faces(f, bc, axis, (-1 / 12, 7 / 12, 7 / 12, -1 / 12), (-2, -1, 0, 1))


def face_gradient(f: CellField, axis: int, bc: BcSpec | None = None) -> np.ndarray:
    """Face averages of the normal derivative along ``axis``."""
    h = f.grid.h
    return _faces(f, bc, axis, (1 / (12 * h), -15 / (12 * h), 15 / (12 * h), -1 / (12 * h)),
                  (-2, -1, 0, 1))


def _face_diff(F: np.ndarray, axis: int, h: float) -> np.ndarray:
    if axis == 0:
        return (F[1:, :] - F[:-1, :]) / h
    return (F[:, 1:] - F[:, :-1]) / h


def grad(f: CellField, bc: BcSpec) -> VectorField:
    filled = fill_ghosts(f, bc)
    grid, h = f.grid, f.grid.h
    comps = [_face_diff(face_interp(filled, d), d, h) for d in (0, 1)]
    return VectorField.from_interior(grid, *comps)


def div(v: VectorField, bc: VectorBc) -> CellField:
    h = v.grid.h
    out = sum(_face_diff(face_interp(v[d], d, bc_d), d, h)
              for d, bc_d in zip((0, 1), bc))
    return CellField.from_interior(v.grid, out)


def div_faces(fx: np.ndarray, fy: np.ndarray, grid: Grid) -> CellField:
    """Flux-form divergence from given face averages of each component."""
    return CellField.from_interior(grid, _face_diff(fx, 0, grid.h) + _face_diff(fy, 1, grid.h))


def laplacian(f: CellField, bc: BcSpec) -> CellField:
    filled = fill_ghosts(f, bc)
    h = f.grid.h
    out = sum(_face_diff(face_gradient(filled, d), d, h) for d in (0, 1))
    return CellField.from_interior(f.grid, out)


def vector_laplacian(v: VectorField, bc: VectorBc) -> VectorField:
    return VectorField(laplacian(v.x, bc.x), laplacian(v.y, bc.y))


def _gradient2(a: np.ndarray, h: float):
    """Second-order gradients of interior data; one-sided at the edges."""
    return np.gradient(a, h, edge_order=2)


def product_average(f: CellField, g: CellField) -> CellField:
    """Fourth-order cell average of the pointwise product of ``f`` and ``g``.

    The h^2/12 correction only needs second-order gradients, which are taken
    from interior data so no ghosts are required.
    """
    h = f.grid.h
    a, b = f.interior, g.interior
    ga, gb = _gradient2(a, h), _gradient2(b, h)
    corr = ga[0] * gb[0] + ga[1] * gb[1]
    return CellField.from_interior(f.grid, a * b + (h * h / 12.0) * corr)


def convection(u: VectorField, bc: VectorBc) -> VectorField:
    """Cell averages of (u . grad) u."""
    grads = [grad(u[c], bc[c]) for c in (0, 1)]
    comps = []
    for c in (0, 1):
        acc = sum(product_average(u[d], grads[c][d]).interior for d in (0, 1))
        comps.append(acc)
    return VectorField.from_interior(u.grid, *comps)


def _interior_stack(a) -> np.ndarray:
    if isinstance(a, VectorField):
        return a.interior
    return a.interior[None]


def inner_product(a, b) -> float:
    """Sum over cells of |C| a.b (plain cell-average quadrature)."""
    h2 = a.grid.cell_volume
    return float(h2 * np.sum(_interior_stack(a) * _interior_stack(b)))


def inner_product_4(a, b) -> float:
    """Fourth-order approximation of the integral of a.b from cell averages."""
    h = a.grid.h
    total = 0.0
    for ai, bi in zip(_interior_stack(a), _interior_stack(b)):
        ga, gb = _gradient2(ai, h), _gradient2(bi, h)
        total += np.sum(ai * bi + (h * h / 12.0) * (ga[0] * gb[0] + ga[1] * gb[1]))
    return float(h * h * total)


def norm(f, p: float = 2) -> float:
    """Discrete L1, L2 or Linf norm; vector fields are treated componentwise."""
    x = _interior_stack(f)
    h2 = f.grid.cell_volume
    if p == 1:
        return float(h2 * np.sum(np.abs(x)))
    if p == 2:
        return float(np.sqrt(h2 * np.sum(x * x)))
    if p == np.inf:
        return float(np.max(np.abs(x))) if x.size else 0.0
    raise ValueError(f"unsupported norm {p!r}")


def icv(a: VectorField, b: VectorField, bc: VectorBc) -> float:
    """Discrete integral of ((a . grad) a) . b."""
    return inner_product_4(convection(a, bc), b)


def vorticity(u: VectorField, bc: VectorBc) -> CellField:
    return grad(u.y, bc.y).x - grad(u.x, bc.x).y


def _boole_matrix(n: int) -> np.ndarray:
    """(n, 4n+1) matrix averaging point samples at quarter-cell spacing."""
    M = np.zeros((n, 4 * n + 1))
    for i in range(n):
        M[i, 4 * i:4 * i + 5] = BOOLE_WEIGHTS
    return M


def _quarter_points(grid: Grid, axis: int) -> np.ndarray:
    n = grid.nx if axis == 0 else grid.ny
    return grid.origin[axis] + grid.h * np.arange(4 * n + 1) / 4.0


def init_cell_averages(closure: Callable, grid: Grid):
    """Cell averages of a pointwise closure by tensor-product Boole quadrature.

    ``closure(x, y)`` must broadcast over arrays; if it returns a pair the
    result is a :class:`VectorField`.
    """
    X, Y = np.meshgrid(_quarter_points(grid, 0), _quarter_points(grid, 1), indexing="ij")
    vals = closure(X, Y)
    Bx, By = _boole_matrix(grid.nx), _boole_matrix(grid.ny)

    def avg(v):
        v = np.broadcast_to(np.asarray(v, dtype=float), X.shape)
        return Bx @ v @ By.T

    if isinstance(vals, tuple):
        return VectorField.from_interior(grid, avg(vals[0]), avg(vals[1]))
    return CellField.from_interior(grid, avg(vals))


def face_averages(closure: Callable, grid: Grid, axis: int) -> np.ndarray:
    """Boole face averages of a scalar closure on faces normal to ``axis``."""
    faces = grid.faces(axis)
    pts = _quarter_points(grid, 1 - axis)
    B = _boole_matrix(grid.ny if axis == 0 else grid.nx)
    if axis == 0:
        X, Y = np.meshgrid(faces, pts, indexing="ij")
        return np.broadcast_to(np.asarray(closure(X, Y), dtype=float), X.shape) @ B.T
    X, Y = np.meshgrid(pts, faces, indexing="ij")
    return B @ np.broadcast_to(np.asarray(closure(X, Y), dtype=float), X.shape)


WALL_AXIS = {"xlo": (0, 0), "xhi": (0, -1), "ylo": (1, 0), "yhi": (1, -1)}
WALL_SIGN = {"xlo": -1.0, "xhi": 1.0, "ylo": -1.0, "yhi": 1.0}


def wall_slice(faces: np.ndarray, wall: str) -> np.ndarray:
    axis, idx = WALL_AXIS[wall]
    return faces[idx, :] if axis == 0 else faces[:, idx]


def wall_normal(v: VectorField, bc: VectorBc) -> dict[str, np.ndarray]:
    """Outward normal component of ``v`` on each wall, as face averages."""
    out = {}
    faces = [face_interp(v[d], d, bc[d]) for d in (0, 1)]
    for wall, (axis, _) in WALL_AXIS.items():
        out[wall] = WALL_SIGN[wall] * wall_slice(faces[axis], wall)
    return out


def wall_normal_extrapolated(v: VectorField) -> dict[str, np.ndarray]:
    """Outward normal component on the walls from a one-sided quartic fit."""
    return wall_normal(v, VectorBc.same(EXTRAPOLATE))


def _trace_second_derivative(f: np.ndarray, h: float) -> np.ndarray:
    """Face averages of f'' along a wall from face averages of f, which
    vanishes at both corners."""
    n = f.size
    W, _ = ghost_weights(Kind.DIRICHLET, 2)
    a = np.empty(n + 4)
    a[2:-2] = f
    a[1], a[0] = W[0] @ f[:5], W[1] @ f[:5]
    a[-2], a[-1] = W[0] @ f[::-1][:5], W[1] @ f[::-1][:5]
    st = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    return sum(st[m] * a[m:m + n] for m in range(5))


def wall_normal_laplacian(w: VectorField) -> dict[str, np.ndarray]:
    """Outward normal component of Lap(w) on each wall for w obeying the
    electric conditions.

    On a wall n.Lap(w) = n.(d_nn + d_tt) w_n with d_n w_n = 0. The normal
    part comes from the one-sided quartic fit behind the ghost fill and the
    tangential part from the wall trace of w_n, which vanishes at corners.
    Extrapolating a cell-averaged Laplacian to the wall instead couples
    back into the divergence and is unstable at small cell Reynolds number.
    """
    h = w.grid.h
    wd = wall_second_derivative_weights() / (h * h)
    trace = wall_normal(w, electric_bc())
    ax, ay = w.x.interior, w.y.interior
    normal = {
        "xlo": ax[:4, :], "xhi": ax[::-1][:4, :],
        "ylo": ay[:, :4].T, "yhi": ay[:, ::-1][:, :4].T,
    }
    out = {}
    for wall, near in normal.items():
        sign = WALL_SIGN[wall]
        dnn = np.tensordot(wd, near, axes=(0, 0))
        out[wall] = sign * (dnn + _trace_second_derivative(sign * trace[wall], h))
    return out


def wall_flux_sum(data: dict[str, np.ndarray], grid: Grid) -> float:
    """Boundary integral of per-wall face data."""
    return float(grid.h * sum(np.sum(d) for d in data.values()))
