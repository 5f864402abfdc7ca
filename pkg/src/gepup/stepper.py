"""Fully discrete GePUP-ES-SDIRK time stepping.

The evolved pair is the non-solenoidal velocity ``W`` (electric boundary
conditions) and the scalar auxiliary variable ``r``. Each SDIRK stage is
split into ``r``-independent and ``r``-proportional parts so that every
stage costs a fixed sequence of linear solves; ``r`` itself is then found
from one scalar equation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fvops
from .fvops import convection, div, div_faces, face_averages, grad, icv, init_cell_averages
from .grid import (EXTRAPOLATE, NEUMANN_ZERO, CellField, ConfigurationError, Grid,
                   VectorBc, VectorField, electric_bc, noslip_bc)
from .linsolve import EllipticSolver
from .projection import project
from .tableau import (STARTUP_NODES, STEADY_NODES, ButcherTableau, extrapolate,
                      is_algebraically_stable, rk4, sdirk43)

log = logging.getLogger(__name__)

ForcingClosure = Callable[[np.ndarray, np.ndarray, float], tuple]


class DegenerateStageError(RuntimeError):
    pass


class StepError(RuntimeError):
    """A step failed; carries the step index and stage for context."""

    def __init__(self, step_index: int, stage: Optional[int], cause: Exception):
        where = f"step {step_index}" + (f", stage {stage}" if stage is not None else "")
        super().__init__(f"{where}: {cause}")
        self.step_index = step_index
        self.stage = stage
        self.cause = cause


class Forcing:
    """Body force g(x, y, t) with cell averages, wall data and flux divergence."""

    def __init__(self, closure: ForcingClosure | None, grid: Grid):
        self.closure = closure
        self.grid = grid

    def at(self, t: float):
        """Return (cell averages, outward wall normal data, flux divergence)."""
        grid = self.grid
        if self.closure is None:
            zeros = {w: np.zeros(grid.wall_length(w)) for w in fvops.WALL_AXIS}
            return VectorField.zeros(grid), zeros, CellField.zeros(grid)
        g = self.closure
        cell = init_cell_averages(lambda x, y: g(x, y, t), grid)
        fx = face_averages(lambda x, y: g(x, y, t)[0], grid, 0)
        fy = face_averages(lambda x, y: g(x, y, t)[1], grid, 1)
        faces = (fx, fy)
        data = {w: fvops.WALL_SIGN[w] * fvops.wall_slice(faces[ax], w)
                for w, (ax, _) in fvops.WALL_AXIS.items()}
        return cell, data, div_faces(fx, fy, grid)


@dataclass
class GepupState:
    t: float
    W: VectorField
    U: VectorField
    r: float = 1.0
    step_index: int = 0
    # accepted (U, W) at t^{n-2}, t^{n-1}, t^n (oldest first, up to three)
    past: list = field(default_factory=list)


@dataclass
class StageRecord:
    """Per-stage quantities of the last step, kept for inspection and tests."""

    w_tilde: VectorField
    u_tilde: VectorField
    conv: VectorField
    q1: CellField
    q2: CellField
    w_parts: list
    u_parts: list
    r: float
    alpha: float
    w: VectorField
    u: VectorField
    q: CellField
    rho: VectorField
    denominator: float


@dataclass
class StepWorkspace:
    nodes: tuple
    stages: list = field(default_factory=list)


def _add_walls(*terms) -> dict:
    out = {}
    for scale, data in terms:
        for w, v in data.items():
            out[w] = out.get(w, 0.0) + scale * v
    return out


class GepupStepper:
    """GePUP-ES-SDIRK stepper on one grid.

    ``u_bc`` is the ghost rule used when differentiating the projected
    velocity in the convection term.
    """

    def __init__(self, grid: Grid, nu: float, lam: float = 1.0,
                 forcing: ForcingClosure | None = None,
                 tableau: ButcherTableau | None = None,
                 predictor: ButcherTableau | None = None,
                 solver: EllipticSolver | None = None,
                 u_bc: str = "noslip",
                 stage_tol: float = 1e-10, projection_tol: float = 1e-12,
                 check_stability: bool = True):
        if nu <= 0:
            raise ConfigurationError("viscosity must be positive")
        if lam < 0:
            raise ConfigurationError("penalty parameter must be non-negative")
        self.grid = grid
        self.nu = float(nu)
        self.lam = float(lam)
        self.forcing = Forcing(forcing, grid)
        self.tableau = tableau or sdirk43()
        if not self.tableau.is_sdirk:
            raise ConfigurationError(f"tableau {self.tableau.name!r} is not SDIRK")
        if check_stability and not is_algebraically_stable(self.tableau).stable:
            raise ConfigurationError(f"tableau {self.tableau.name!r} is not algebraically stable")
        self.predictor = predictor or rk4()
        if not self.predictor.is_explicit:
            raise ConfigurationError("predictor tableau must be explicit")
        self.solver = solver or EllipticSolver(grid)
        self.w_bc = electric_bc()
        self.u_bc = {"noslip": noslip_bc(), "electric": electric_bc(),
                     "neumann": VectorBc.same(NEUMANN_ZERO)}[u_bc]
        self.stage_tol = stage_tol
        self.projection_tol = projection_tol
        self.last_workspace: StepWorkspace | None = None

    # -- building blocks ---------------------------------------------------
    def project(self, w: VectorField) -> VectorField:
        return project(w, self.solver, self.projection_tol, self.w_bc)[0]

    def initial_state(self, u0: VectorField, t0: float = 0.0, r0: float = 1.0) -> GepupState:
        """W and U start from the same field."""
        return GepupState(t0, u0.copy(), u0.copy(), r0, 0, [(u0.copy(), u0.copy())])

    def laplacian(self, w: VectorField) -> VectorField:
        return fvops.vector_laplacian(w, self.w_bc)

    def helmholtz(self, alpha: float, rhs: VectorField) -> VectorField:
        comps = [self.solver.solve_helmholtz(alpha, rhs[d], self.w_bc[d], self.stage_tol)[0]
                 for d in (0, 1)]
        return VectorField(*comps)

    def convection(self, u: VectorField) -> VectorField:
        return convection(u, self.u_bc)

    def icv(self, a: VectorField, b: VectorField) -> float:
        return icv(a, b, self.u_bc)

    def _wall_terms(self, w: VectorField) -> dict:
        """Outward normal data nu n.Lap(w) + lambda n.w on the walls."""
        return _add_walls((self.nu, fvops.wall_normal_laplacian(w)),
                          (self.lam, fvops.wall_normal(w, self.w_bc)))

    def _poisson(self, rhs: CellField, data: dict) -> CellField:
        q, _ = self.solver.solve_poisson_neumann(rhs, data, self.stage_tol)
        return q

    def _grad(self, q: CellField, data: dict) -> VectorField:
        return grad(q, NEUMANN_ZERO.with_data(data))

    # -- explicit GePUP-E predictor -----------------------------------------
    def rhs_e(self, W: VectorField, t: float, U: VectorField | None = None):
        """Slope of the GePUP-E system (r = 1, all terms explicit)."""
        U = self.project(W) if U is None else U
        g, g_wall, g_div = self.forcing.at(t)
        conv = self.convection(U)
        lap_w = self.laplacian(W)
        ext = VectorBc.same(EXTRAPOLATE)
        rhs = g_div - div(conv, ext)
        data = _add_walls((1.0, g_wall), (-1.0, fvops.wall_normal(conv, ext)),
                          (1.0, self._wall_terms(W)))
        q = self._poisson(rhs, data)
        rho = g - conv - self._grad(q, data) + self.nu * lap_w
        return rho, U

    def erk_predict_step(self, W: VectorField, U: VectorField, t: float, k: float,
                         substeps: int = 1, record_slopes: bool = False):
        """Advance (W, U) by ``substeps`` explicit RK steps of size k/substeps.

        Returns the list of (U, W) at each substep end and, optionally, the
        stage slopes of every substep.
        """
        tab = self.predictor
        dt = k / substeps
        out, slopes = [], []
        for m in range(substeps):
            ys = []
            for i in range(tab.s):
                Wi = W
                for j in range(i):
                    if tab.A[i, j] != 0.0:
                        Wi = Wi + (dt * tab.A[i, j]) * ys[j]
                y, _ = self.rhs_e(Wi, t + tab.c[i] * dt, U if i == 0 else None)
                ys.append(y)
            for j in range(tab.s):
                W = W + (dt * tab.b[j]) * ys[j]
            U = self.project(W)
            t = t + dt
            out.append((U, W))
            slopes.append(ys)
        return (out, slopes) if record_slopes else out

    def history(self, state: GepupState, k: float):
        """Node offsets and (U, W) samples for extrapolating stage values."""
        if state.step_index < 2 or len(state.past) < 3:
            subs = self.erk_predict_step(state.W, state.U, state.t, k, substeps=3)
            samples = [(state.U, state.W)] + subs
            nodes = STARTUP_NODES
        else:
            (pred,) = self.erk_predict_step(state.W, state.U, state.t, k)
            samples = list(state.past[-3:]) + [pred]
            nodes = STEADY_NODES
        return nodes, [s[0] for s in samples], [s[1] for s in samples]

    def stage_predictions(self, state: GepupState, k: float):
        nodes, us, ws = self.history(state, k)
        c = self.tableau.c
        return nodes, extrapolate(us, nodes, c), extrapolate(ws, nodes, c)

    # -- the SDIRK step ------------------------------------------------------
    def step(self, state: GepupState, k: float) -> GepupState:
        try:
            nodes, u_tilde, w_tilde = self.stage_predictions(state, k)
        except Exception as exc:  # noqa: BLE001 - re-raised with context
            raise StepError(state.step_index, None, exc) from exc
        tab = self.tableau
        A, gamma, s = tab.A, tab.gamma, tab.s
        nu, alpha_h = self.nu, self.nu * tab.gamma * k
        ws = StepWorkspace(nodes)
        ext = VectorBc.same(EXTRAPOLATE)

        g_cell, conv, gq1, gq2 = [], [], [], []
        lap_w0 = []            # L w_0^{(j)}
        lap_wl = []            # lap_wl[j][l-1] = L w_l^{(j)}
        r_stage, alphas, rhos = [], [], []

        for i in range(s):
            try:
                t_i = state.t + tab.c[i] * k
                g, g_wall, g_div = self.forcing.at(t_i)
                ut, wt = u_tilde[i], w_tilde[i]
                # pressure driven by forcing, viscous and penalty wall data
                q1_data = _add_walls((1.0, g_wall), (1.0, self._wall_terms(wt)))
                q1 = self._poisson(g_div, q1_data)
                # pressure balancing convection
                c_i = self.convection(ut)
                q2_data = {w: -v for w, v in fvops.wall_normal(c_i, ext).items()}
                q2 = self._poisson(-div(c_i, ext), q2_data)
                g_cell.append(g)
                conv.append(c_i)
                gq1.append(self._grad(q1, q1_data))
                gq2.append(self._grad(q2, q2_data))
                # implicit viscous solves, one per scalar-variable component
                rhs0 = state.W
                for j in range(i + 1):
                    rhs0 = rhs0 + (k * A[i, j]) * (g_cell[j] - gq1[j])
                for j in range(i):
                    rhs0 = rhs0 + (nu * k * A[i, j]) * lap_w0[j]
                w_parts = [self.helmholtz(alpha_h, rhs0)]
                for l in range(1, i + 2):
                    rhs_l = (-k * A[i, l - 1]) * (conv[l - 1] + gq2[l - 1])
                    for j in range(l - 1, i):
                        rhs_l = rhs_l + (nu * k * A[i, j]) * lap_wl[j][l - 1]
                    w_parts.append(self.helmholtz(alpha_h, rhs_l))
                lap_parts = [self.laplacian(wp) for wp in w_parts]
                lap_w0.append(lap_parts[0])
                lap_wl.append(lap_parts[1:])
                # project each component
                u_parts = [self.project(wp) for wp in w_parts]
                # scalar auxiliary variable for this stage
                u_bar = u_parts[0]
                for l in range(1, i + 1):
                    u_bar = u_bar + r_stage[l - 1] * u_parts[l]
                denom = 1.0 - gamma * k * self.icv(ut, u_parts[i + 1])
                if abs(denom) < 1e-12:
                    raise DegenerateStageError(f"scalar stage denominator {denom:.3e}")
                num = state.r + gamma * k * self.icv(ut, u_bar)
                for j in range(i):
                    num += k * A[i, j] * alphas[j]
                r_i = num / denom
                r_stage.append(r_i)
                # assemble the stage and its slope
                w_i = w_parts[0]
                lap_i = lap_parts[0]
                u_i = u_parts[0]
                for l in range(1, i + 2):
                    w_i = w_i + r_stage[l - 1] * w_parts[l]
                    lap_i = lap_i + r_stage[l - 1] * lap_parts[l]
                    u_i = u_i + r_stage[l - 1] * u_parts[l]
                q_i = q1 + r_i * q2
                alpha_i = self.icv(ut, u_i)
                alphas.append(alpha_i)
                rho_i = g - r_i * c_i - (gq1[i] + r_i * gq2[i]) + nu * lap_i
                rhos.append(rho_i)
                ws.stages.append(StageRecord(wt, ut, c_i, q1, q2, w_parts, u_parts, r_i,
                                             alpha_i, w_i, u_i, q_i, rho_i, denom))
            except StepError:
                raise
            except Exception as exc:  # noqa: BLE001 - re-raised with context
                raise StepError(state.step_index, i + 1, exc) from exc

        W_new = state.W
        r_new = state.r
        for i in range(s):
            W_new = W_new + (k * tab.b[i]) * rhos[i]
            r_new += k * tab.b[i] * alphas[i]
        U_new = self.project(W_new)
        self.last_workspace = ws
        past = (list(state.past) + [(U_new, W_new)])[-3:]
        return GepupState(state.t + k, W_new, U_new, r_new, state.step_index + 1, past)


def oracle_step(stepper: GepupStepper, state: GepupState, k: float,
                tol: float = 1e-15, max_iter: int = 200) -> GepupState:
    """One step of the undecomposed stage equations, for cross-checking.

    Each stage is solved by fixed-point iteration on the stage value of r:
    for a trial r the pressure, the implicit velocity stage and its
    projection are computed directly, then r is updated from its own stage
    equation. Uses the same extrapolated stage predictions as ``step``.
    """
    tab = stepper.tableau
    A, gamma, s = tab.A, tab.gamma, tab.s
    nu = stepper.nu
    _, u_tilde, w_tilde = stepper.stage_predictions(state, k)
    ext = VectorBc.same(EXTRAPOLATE)
    rhos, alphas = [], []
    for i in range(s):
        g, g_wall, g_div = stepper.forcing.at(state.t + tab.c[i] * k)
        ut, wt = u_tilde[i], w_tilde[i]
        c_i = stepper.convection(ut)
        div_c = div(c_i, ext)
        c_wall = fvops.wall_normal(c_i, ext)
        base_wall = _add_walls((1.0, g_wall), (1.0, stepper._wall_terms(wt)))
        explicit = state.W
        for j in range(i):
            explicit = explicit + (k * A[i, j]) * rhos[j]
        r_known = state.r + sum(k * A[i, j] * alphas[j] for j in range(i))
        r = state.r
        for _ in range(max_iter):
            data = _add_walls((1.0, base_wall), (-r, c_wall))
            q = stepper._poisson(g_div - r * div_c, data)
            gq = stepper._grad(q, data)
            w = stepper.helmholtz(nu * gamma * k, explicit + (k * gamma) * (g - r * c_i - gq))
            u = stepper.project(w)
            r_next = r_known + k * gamma * stepper.icv(ut, u)
            done = abs(r_next - r) <= tol * max(1.0, abs(r))
            r = r_next
            if done:
                break
        else:
            raise RuntimeError("oracle fixed-point iteration did not converge")
        data = _add_walls((1.0, base_wall), (-r, c_wall))
        q = stepper._poisson(g_div - r * div_c, data)
        gq = stepper._grad(q, data)
        w = stepper.helmholtz(nu * gamma * k, explicit + (k * gamma) * (g - r * c_i - gq))
        u = stepper.project(w)
        alphas.append(stepper.icv(ut, u))
        rhos.append(g - r * c_i - gq + nu * stepper.laplacian(w))
    W_new, r_new = state.W, state.r
    for i in range(s):
        W_new = W_new + (k * tab.b[i]) * rhos[i]
        r_new += k * tab.b[i] * alphas[i]
    U_new = stepper.project(W_new)
    past = (list(state.past) + [(U_new, W_new)])[-3:]
    return GepupState(state.t + k, W_new, U_new, r_new, state.step_index + 1, past)
