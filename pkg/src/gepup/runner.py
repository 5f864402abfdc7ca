"""Fixed-step time loop over a benchmark case."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from . import fvops
from .cases import CaseSpec, initial_condition
from .diagnostics import DiagnosticsRecord, record
from .linsolve import EllipticSolver
from .stepper import GepupState, GepupStepper, oracle_step

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    case: CaseSpec
    state: GepupState
    records: list[DiagnosticsRecord]
    k: float
    steps: int
    oracle_gap: float | None = None


def n_steps(case: CaseSpec) -> tuple[int, float]:
    """Number of steps and the step size that lands exactly on te."""
    span = case.te - case.t0
    if span == 0.0:
        return 0, case.time_step()
    n = max(1, math.ceil(span / case.time_step() - 1e-9))
    return n, span / n


def make_stepper(case: CaseSpec, u_bc: str = "noslip", solver_method: str = "direct"):
    grid = case.grid()
    solver = EllipticSolver(grid, method=solver_method)
    u0, forcing = initial_condition(case, grid, solver)
    stepper = GepupStepper(grid, case.nu, case.lam, forcing, solver=solver, u_bc=u_bc)
    return stepper, stepper.initial_state(u0, case.t0)


def run(case: CaseSpec, u_bc: str = "noslip", solver_method: str = "direct",
        oracle: bool = False, progress=None) -> RunResult:
    """Integrate ``case`` from t0 to te with a fixed step.

    The step is the Courant-number step ``cr h / u_max`` (or ``case.k``),
    shrunk slightly so an integer number of steps reaches te. With
    ``oracle=True`` the first step is also taken by the undecomposed
    fixed-point oracle and the relative gap in W is reported.
    """
    stepper, state = make_stepper(case, u_bc, solver_method)
    steps, k = n_steps(case)
    records = [record(state)]
    gap = None
    for n in range(steps):
        new = stepper.step(state, k)
        if oracle and n == 0:
            ref = oracle_step(stepper, state, k)
            gap = fvops.norm(new.W - ref.W) / max(fvops.norm(ref.W), 1e-300)
        state = new
        records.append(record(state))
        if progress is not None:
            progress(n + 1, steps, records[-1])
    log.info("%s n=%d: %d steps of k=%.4g", case.name, case.n, steps, k)
    return RunResult(case, state, records, k, steps, gap)
