"""Elliptic solvers: pure-Neumann Poisson and mixed-BC Helmholtz problems.

Operators are assembled as sparse matrices on interior unknowns from the
same ghost weights used by :func:`gepup.grid.fill_ghosts`; the affine part
coming from inhomogeneous boundary data is obtained by applying the field
operator to a zero field. Each returned solution is checked against its
residual contract with the field operator, so the matrix and the stencil
code verify each other on every solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import fvops
from .grid import NEUMANN_ZERO, BcSpec, CellField, Grid, Kind, WallBc, ghost_weights

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    def __init__(self, msg: str, residual: float):
        super().__init__(f"{msg} (relative residual {residual:.3e})")
        self.residual = residual


@dataclass
class SolveInfo:
    residual: float
    iterations: int
    shift: float = 0.0


def ghost_matrix(n: int, g: int, lo: Kind, hi: Kind) -> sp.csr_matrix:
    """(n + 2g, n) map from interior values to padded values (homogeneous data)."""
    E = sp.lil_matrix((n + 2 * g, n))
    for i in range(n):
        E[g + i, i] = 1.0
    Wl, _ = ghost_weights(lo, g)
    Wh, _ = ghost_weights(hi, g)
    for m in range(g):
        for j in range(5):
            E[g - 1 - m, j] = Wl[m, j]
            E[g + n + m, n - 1 - j] = Wh[m, j]
    return E.tocsr()


def laplacian_1d(n: int, h: float, g: int, lo: Kind, hi: Kind) -> sp.csr_matrix:
    stencil = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    S = sp.lil_matrix((n, n + 2 * g))
    for i in range(n):
        S[i, g + i - 2:g + i + 3] = stencil
    return (S.tocsr() @ ghost_matrix(n, g, lo, hi)).tocsr()


def laplacian_matrix(grid: Grid, bc: BcSpec) -> sp.csr_matrix:
    """Sparse discrete Laplacian on interior cells (C order, i major)."""
    k = bc.kinds
    g = grid.n_ghost
    Lx = laplacian_1d(grid.nx, grid.h, g, k[0], k[1])
    Ly = laplacian_1d(grid.ny, grid.h, g, k[2], k[3])
    return (sp.kron(Lx, sp.identity(grid.ny)) + sp.kron(sp.identity(grid.nx), Ly)).tocsr()


class EllipticSolver:
    """Factorization cache for the elliptic problems on one grid.

    ``method="direct"`` factors each operator once with SuperLU and applies
    iterative refinement; ``method="gmres"`` runs GMRES preconditioned with an
    incomplete LU factorization. Not thread-safe; use one instance per run.
    """

    def __init__(self, grid: Grid, method: str = "direct", max_iter: int = 20):
        if method not in ("direct", "gmres"):
            raise ValueError(f"unknown solver method {method!r}")
        self.grid = grid
        self.method = method
        self.max_iter = max_iter
        self._ops: dict = {}

    # -- operator assembly -------------------------------------------------
    def _operator(self, key):
        op = self._ops.get(key)
        if op is not None:
            return op
        grid = self.grid
        if key[0] == "poisson":
            A = laplacian_matrix(grid, NEUMANN_ZERO).tolil()
            # the constant mode spans the null space; pin the first unknown
            A[0, :] = 0.0
            A[0, 0] = 1.0
            A = A.tocsc()
        else:
            _, alpha, kinds = key
            L = laplacian_matrix(grid, BcSpec(*(WallBc(k) for k in kinds)))
            A = (sp.identity(grid.nx * grid.ny) - alpha * L).tocsc()
        if self.method == "direct":
            fact = spla.splu(A)
            solve = fact.solve
        else:
            ilu = spla.spilu(A, drop_tol=1e-5, fill_factor=20)
            M = spla.LinearOperator(A.shape, ilu.solve)

            def solve(b, A=A, M=M):
                x, _ = spla.gmres(A, b, M=M, rtol=1e-14, atol=0.0, restart=50, maxiter=20)
                return x
        op = (A, solve)
        self._ops[key] = op
        return op

    # -- Poisson ------------------------------------------------------------
    def solve_poisson_neumann(self, rhs: CellField, neumann_data=None,
                              tol: float = 1e-12) -> tuple[CellField, SolveInfo]:
        """Solve L phi = rhs' with n.grad(phi) = data, returning mean-zero phi.

        ``rhs'`` is ``rhs`` minus the constant that makes the problem
        compatible, sum |C| rhs' = boundary integral of the data; that
        constant is reported as ``info.shift``.
        """
        grid = self.grid
        bc = NEUMANN_ZERO.with_data(neumann_data or {})
        area = grid.nx * grid.ny * grid.cell_volume
        boundary = fvops.wall_flux_sum(neumann_data or {}, grid)
        shift = (grid.cell_volume * float(np.sum(rhs.interior)) - boundary) / area
        target = rhs.interior - shift
        affine = fvops.laplacian(CellField.zeros(grid), bc).interior
        b = (target - affine).ravel()
        _, solve = self._operator(("poisson",))
        scale = max(_l2(target, grid), _l2(affine, grid))

        def apply(x):
            return fvops.laplacian(CellField.from_interior(grid, x), bc).interior

        phi, res, its = self._refine(solve, b, target, apply, scale, tol, pin=True)
        return CellField.from_interior(grid, phi), SolveInfo(res, its, shift)

    # -- Helmholtz ----------------------------------------------------------
    def solve_helmholtz(self, alpha: float, rhs: CellField, bc: BcSpec,
                        tol: float = 1e-10) -> tuple[CellField, SolveInfo]:
        """Solve (I - alpha L) phi = rhs under ``bc``."""
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        grid = self.grid
        if alpha == 0.0:
            return rhs.copy(), SolveInfo(0.0, 0)
        affine = fvops.laplacian(CellField.zeros(grid), bc).interior
        target = rhs.interior
        b = (target + alpha * affine).ravel()
        _, solve = self._operator(("helmholtz", float(alpha), bc.kinds))
        scale = max(_l2(target, grid), alpha * _l2(affine, grid))

        def apply(x):
            f = CellField.from_interior(grid, x)
            return x - alpha * fvops.laplacian(f, bc).interior

        phi, res, its = self._refine(solve, b, target, apply, scale, tol, pin=False)
        return CellField.from_interior(grid, phi), SolveInfo(res, its)

    def _refine(self, solve, b, target, apply, scale, tol, pin):
        grid = self.grid
        shape = grid.shape
        if scale == 0.0:
            return np.zeros(shape), 0.0, 0
        x = np.zeros(b.size)
        rhs = b.copy()
        res = np.inf
        for it in range(1, self.max_iter + 1):
            if pin:
                rhs[0] = 0.0
            x += solve(rhs)
            if pin:
                x -= x.mean()
            r = target - apply(x.reshape(shape))
            res = _l2(r, grid) / scale
            if res <= tol:
                return x.reshape(shape), res, it
            rhs = r.ravel()
        raise SolverError(f"elliptic solve did not converge in {self.max_iter} sweeps", res)


def _l2(a: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.cell_volume * np.sum(a * a)))


def solve_poisson_neumann(rhs: CellField, neumann_data=None, tol: float = 1e-12,
                          solver: EllipticSolver | None = None):
    solver = solver or EllipticSolver(rhs.grid)
    return solver.solve_poisson_neumann(rhs, neumann_data, tol)


def solve_helmholtz(alpha: float, rhs: CellField, bc: BcSpec, tol: float = 1e-10,
                    solver: EllipticSolver | None = None):
    solver = solver or EllipticSolver(rhs.grid)
    return solver.solve_helmholtz(alpha, rhs, bc, tol)
