import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import sin_cell_avg
from gepup.diagnostics import DiagnosticsRecord, coarsen, observed_order, record, richardson_error
from gepup.grid import CellField, VectorField, build_grid
from gepup.stepper import GepupState


def _state(grid, U, r=1.0):
    return GepupState(0.0, U.copy(), U.copy(), r)


def test_record_of_rest_state(grid16):
    rec = record(_state(grid16, VectorField.zeros(grid16)))
    assert rec.E_h == 0.5 and rec.kinetic == 0.0
    assert rec.div_l1 == rec.div_l2 == rec.div_linf == 0.0
    assert rec.sav_dev == 0.0 and rec.wall_normal_max == 0.0


def test_energy_arithmetic(grid16):
    # |U|_C^2 = 2 for a uniform field of speed sqrt(2) on the unit square
    U = VectorField.from_interior(grid16, np.ones((16, 16)), np.ones((16, 16)))
    rec = record(_state(grid16, U, r=1.0))
    assert rec.E_h == pytest.approx(1.5, abs=1e-14)
    assert rec.kinetic == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(r=st.floats(-2, 2, allow_nan=False), s=st.floats(-3, 3, allow_nan=False))
def test_energy_identity(r, s):
    grid = build_grid(8, 8)
    U = VectorField.from_interior(grid, s * np.ones((8, 8)), np.zeros((8, 8)))
    rec = record(_state(grid, U, r))
    assert rec.E_h >= 0
    assert rec.E_h == pytest.approx(rec.kinetic + 0.5 * r * r, abs=1e-12)
    assert rec.sav_dev == pytest.approx(abs(r - 1))


def test_record_names_match_row(grid16):
    rec = record(_state(grid16, VectorField.zeros(grid16)))
    assert DiagnosticsRecord.names() == ["t", "E_h", "sav_dev", "div_l1", "div_l2", "div_linf",
                                         "wall_normal_max", "kinetic"]
    assert len(rec.as_row()) == 8 and rec.as_dict()["E_h"] == rec.E_h


def test_coarsen_preserves_integral():
    fine = build_grid(16, 16)
    f = CellField.from_interior(fine, np.random.default_rng(1).random((16, 16)))
    c = coarsen(f)
    assert c.grid.h == 2 * fine.h
    assert c.interior.sum() * c.grid.cell_volume == pytest.approx(f.interior.sum() * fine.cell_volume)


def test_richardson_zero_for_block_average():
    fine = build_grid(16, 16)
    f = CellField.from_interior(fine, np.random.default_rng(2).random((16, 16)))
    assert richardson_error(coarsen(f), f) == 0.0


def test_richardson_exact_averages_commute():
    # exact cell averages restrict exactly, so only round-off remains
    coarse, fine = build_grid(16, 16), build_grid(32, 32)
    fc = CellField.from_interior(coarse, sin_cell_avg(np.pi, 2 * np.pi, coarse))
    ff = CellField.from_interior(fine, sin_cell_avg(np.pi, 2 * np.pi, fine))
    assert richardson_error(fc, ff, np.inf) < 1e-14


def test_richardson_requires_refinement():
    a = CellField.zeros(build_grid(16, 16))
    with pytest.raises(ValueError):
        richardson_error(a, a)
    with pytest.raises(ValueError):
        coarsen(CellField.zeros(build_grid(15, 15)))


arr = arrays(np.float64, (16, 16), elements=st.floats(-1, 1, allow_nan=False))


@settings(max_examples=20, deadline=None)
@given(c=arr, f=arr, p=st.sampled_from([1, 2, np.inf]))
def test_richardson_symmetry_and_linearity(c, f, p):
    cg, fg = build_grid(8, 8), build_grid(16, 16)
    cc = CellField.from_interior(cg, c[:8, :8])
    ff = CellField.from_interior(fg, f)
    e = richardson_error(cc, ff, p)
    assert richardson_error(-cc, -ff, p) == pytest.approx(e, abs=1e-15)
    assert richardson_error(cc * 2.0, ff * 2.0, p) == pytest.approx(2 * e, rel=1e-12, abs=1e-15)


def test_richardson_vector_fields():
    cg, fg = build_grid(8, 8), build_grid(16, 16)
    c = VectorField.from_interior(cg, np.ones((8, 8)), np.zeros((8, 8)))
    f = VectorField.zeros(fg)
    assert richardson_error(c, f, 2) == pytest.approx(1.0)


@pytest.mark.parametrize("a, b, expected", [(8, 1, 3.0), (9.85e-05, 8.71e-06, 3.50), (2.5, 2.5, 0.0)])
def test_observed_order(a, b, expected):
    assert observed_order(a, b) == pytest.approx(expected, abs=5e-3)


@settings(max_examples=50)
@given(e1=st.floats(1e-12, 1.0), e2=st.floats(1e-12, 1.0), a=st.floats(1e-3, 1e3))
def test_observed_order_scale_invariant(e1, e2, a):
    assert math.isclose(observed_order(a * e1, a * e2), observed_order(e1, e2), abs_tol=1e-9)
