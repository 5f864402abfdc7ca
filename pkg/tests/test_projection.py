import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cos_cell_avg
from gepup import fvops
from gepup.cases import init_viscous_box
from gepup.diagnostics import observed_order
from gepup.grid import EXTRAPOLATE, NEUMANN_ZERO, CellField, VectorBc, VectorField, build_grid
from gepup.linsolve import EllipticSolver
from gepup.projection import project, project_repeatedly

EXT = VectorBc.same(EXTRAPOLATE)


def _gradient_field(grid):
    # w = grad(cos(pi x) cos(pi y)) = -pi (sin(pi x) cos(pi y), cos(pi x) sin(pi y))
    k = np.pi
    xf, yf, h = grid.faces(0), grid.faces(1), grid.h
    s = (np.cos(k * xf[:-1]) - np.cos(k * xf[1:])) / (k * h)
    c = (np.sin(k * yf[1:]) - np.sin(k * yf[:-1])) / (k * h)
    return VectorField.from_interior(grid, -k * np.outer(s, c), -k * np.outer(c, s))


def _mixed_field(grid):
    return init_viscous_box(grid) + _gradient_field(grid) * 0.5


def test_gradient_field_projects_to_zero():
    grids = [build_grid(n, n) for n in (16, 32, 64)]
    errs = [fvops.norm(project(_gradient_field(g))[0]) for g in grids]
    divs = [fvops.norm(fvops.div(project(_gradient_field(g))[0], EXT)) for g in grids]
    assert observed_order(errs[1], errs[2]) >= 3.0
    assert observed_order(divs[1], divs[2]) >= 3.0


def test_solenoidal_field_nearly_unchanged():
    errs = []
    for n in (16, 32, 64):
        u0 = init_viscous_box(build_grid(n, n))
        errs.append(fvops.norm(project(u0)[0] - u0))
    assert observed_order(errs[1], errs[2]) >= 3.0


def test_zero_field(grid16):
    u, phi = project(VectorField.zeros(grid16))
    assert not u.interior.any() and not phi.interior.any()


def test_projection_reduces_divergence():
    grid = build_grid(32, 32)
    w = _mixed_field(grid)
    u, _ = project(w)
    assert fvops.norm(fvops.div(u, EXT)) < 1e-3 * fvops.norm(fvops.div(w, EXT))


def test_idempotent_up_to_truncation():
    gaps = []
    for n in (16, 32, 64):
        w = _mixed_field(build_grid(n, n))
        u = project(w)[0]
        gaps.append(fvops.norm(project(u)[0] - u) / fvops.norm(w))
    assert gaps[-1] < 1e-6
    assert observed_order(gaps[1], gaps[2]) >= 3.0


def test_orthogonal_to_gradients():
    grid = build_grid(32, 32)
    u = project(_mixed_field(grid))[0]
    psi = CellField.from_interior(grid, cos_cell_avg(np.pi, 2 * np.pi, grid))
    g = fvops.grad(psi, NEUMANN_ZERO)
    assert abs(fvops.inner_product(u, g)) < 32.0 ** -3 * fvops.norm(u) * fvops.norm(psi)


@settings(max_examples=10, deadline=None)
@given(a=st.floats(-3, 3, allow_nan=False), b=st.floats(-3, 3, allow_nan=False))
def test_linear(a, b):
    grid = build_grid(16, 16)
    solver = EllipticSolver(grid)
    w1, w2 = init_viscous_box(grid), _gradient_field(grid)
    lhs = project(w1 * a + w2 * b, solver)[0]
    rhs = project(w1, solver)[0] * a + project(w2, solver)[0] * b
    scale = max(1.0, abs(a), abs(b))
    assert fvops.norm(lhs - rhs, np.inf) <= 1e-10 * scale


def test_repeated_projection_settles():
    grid = build_grid(32, 32)
    w = _mixed_field(grid)
    u5 = project_repeatedly(w, 5)
    assert fvops.norm(project(u5)[0] - u5) < 1e-3 * fvops.norm(project(w)[0] - w)
    assert project_repeatedly(w, 0) is w


def test_solver_failure_propagates():
    from gepup.linsolve import SolverError
    grid = build_grid(16, 16)
    with pytest.raises(SolverError):
        project(_mixed_field(grid), EllipticSolver(grid, max_iter=0))
