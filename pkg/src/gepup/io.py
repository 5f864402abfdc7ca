"""Field dumps (legacy VTK structured points or flat CSV) and diagnostics CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from . import fvops
from .diagnostics import DiagnosticsRecord
from .grid import electric_bc, noslip_bc


def _open(path: Path, mode="w"):
    path = Path(path)
    try:
        return open(path, mode, newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def field_arrays(state) -> dict[str, np.ndarray]:
    """Cell arrays written by :func:`emit_fields`."""
    return {
        "U": state.U.interior,
        "W": state.W.interior,
        "vorticity": fvops.vorticity(state.U, noslip_bc()).interior,
        "divW": fvops.div(state.W, electric_bc()).interior,
    }


def emit_fields(state, path, fmt: str = "vtk") -> Path:
    path = Path(path)
    arrays = field_arrays(state)
    grid = state.U.grid
    if fmt == "vtk":
        _write_vtk(path, grid, arrays, state.t)
    elif fmt == "csv":
        _write_field_csv(path, grid, arrays)
    else:
        raise ValueError(f"unknown field format {fmt!r}")
    return path


def _flat(a: np.ndarray) -> np.ndarray:
    # VTK cell order runs fastest along x
    return a.T.ravel()


def _write_vtk(path: Path, grid, arrays, t: float) -> None:
    nx, ny = grid.shape
    with _open(path) as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"gepup fields t={t:.17g}\n")
        fh.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {nx + 1} {ny + 1} 1\n")
        fh.write(f"ORIGIN {grid.origin[0]:.17g} {grid.origin[1]:.17g} 0\n")
        fh.write(f"SPACING {grid.h:.17g} {grid.h:.17g} 1\n")
        fh.write(f"CELL_DATA {nx * ny}\n")
        for name, a in arrays.items():
            if a.ndim == 3:
                fh.write(f"VECTORS {name} double\n")
                vx, vy = _flat(a[0]), _flat(a[1])
                for x, y in zip(vx, vy):
                    fh.write(f"{x:.17g} {y:.17g} 0\n")
            else:
                fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                fh.write("\n".join(f"{v:.17g}" for v in _flat(a)))
                fh.write("\n")


def _write_field_csv(path: Path, grid, arrays) -> None:
    X, Y = grid.mesh()
    I, J = np.meshgrid(np.arange(grid.nx), np.arange(grid.ny), indexing="ij")
    cols = {"i": I, "j": J, "x": X, "y": Y}
    for name, a in arrays.items():
        if a.ndim == 3:
            cols[f"{name}_x"], cols[f"{name}_y"] = a[0], a[1]
        else:
            cols[name] = a
    with _open(path) as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        flat = [c.ravel() for c in cols.values()]
        for row in zip(*flat):
            w.writerow([int(v) if k in ("i", "j") else f"{v:.17g}"
                        for k, v in zip(cols, row)])


def read_vtk_cell_data(path) -> tuple[tuple[int, int], dict[str, np.ndarray]]:
    """Parse a file written by :func:`emit_fields` back into (nx, ny) arrays."""
    lines = Path(path).read_text().splitlines()
    dims = None
    out: dict[str, np.ndarray] = {}
    it = iter(lines)
    for line in it:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "DIMENSIONS":
            dims = (int(parts[1]) - 1, int(parts[2]) - 1)
        elif parts[0] == "VECTORS":
            n = dims[0] * dims[1]
            vals = np.array([next(it).split()[:2] for _ in range(n)], dtype=float)
            out[parts[1]] = np.stack([vals[:, d].reshape(dims[1], dims[0]).T for d in (0, 1)])
        elif parts[0] == "SCALARS":
            next(it)
            n = dims[0] * dims[1]
            vals = np.array([next(it) for _ in range(n)], dtype=float)
            out[parts[1]] = vals.reshape(dims[1], dims[0]).T
    return dims, out


def emit_diagnostics(series, path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        w = csv.writer(fh)
        w.writerow(DiagnosticsRecord.names())
        for rec in series:
            w.writerow([f"{v:.17g}" for v in rec.as_row()])
    return path


def read_diagnostics(path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [DiagnosticsRecord(**{k: float(v) for k, v in row.items()}) for row in rows]
