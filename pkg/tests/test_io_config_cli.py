import csv

import numpy as np
import pytest

from gepup import cases, io
from gepup.cli import main
from gepup.config import case_from_mapping, load_config
from gepup.diagnostics import DiagnosticsRecord, record
from gepup.grid import ConfigurationError, VectorField, build_grid
from gepup.runner import run
from gepup.stepper import GepupState
from gepup.sweep import run_convergence_sweep


def _zero_state(nx=8, ny=6):
    grid = build_grid(nx, ny, extent=(nx / 8, ny / 8))
    z = VectorField.zeros(grid)
    return GepupState(0.0, z, z)


def test_vtk_zero_state(tmp_path):
    path = io.emit_fields(_zero_state(), tmp_path / "z.vtk")
    text = path.read_text()
    assert "DIMENSIONS 9 7 1" in text and "CELL_DATA 48" in text
    dims, data = io.read_vtk_cell_data(path)
    assert dims == (8, 6)
    assert set(data) == {"U", "W", "vorticity", "divW"}
    assert all(not a.any() for a in data.values())


def test_vtk_round_trip(tmp_path):
    grid = build_grid(8, 6, extent=(1.0, 0.75))
    rng = np.random.default_rng(3)
    u = VectorField.from_interior(grid, *rng.standard_normal((2, 8, 6)))
    state = GepupState(0.5, u, u)
    _, data = io.read_vtk_cell_data(io.emit_fields(state, tmp_path / "f.vtk"))
    ref = io.field_arrays(state)
    for name in ref:
        np.testing.assert_array_equal(data[name], ref[name])


def test_field_csv(tmp_path):
    state = _zero_state()
    path = io.emit_fields(state, tmp_path / "f.csv", "csv")
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 48
    assert {"i", "j", "x", "y", "U_x", "U_y", "vorticity", "divW"} <= set(rows[0])
    assert float(rows[0]["x"]) == pytest.approx(1 / 16)


def test_unknown_field_format(tmp_path):
    with pytest.raises(ValueError):
        io.emit_fields(_zero_state(), tmp_path / "f.x", "hdf5")


def test_diagnostics_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    recs = [DiagnosticsRecord(*rng.standard_normal(len(DiagnosticsRecord.names())))
            for _ in range(5)]
    back = io.read_diagnostics(io.emit_diagnostics(recs, tmp_path / "d.csv"))
    for a, b in zip(recs, back):
        np.testing.assert_allclose(a.as_row(), b.as_row(), rtol=1e-15, atol=0)


def test_unwritable_path_names_the_path(tmp_path):
    bad = tmp_path / "missing" / "d.csv"
    with pytest.raises(OSError, match="missing"):
        io.emit_diagnostics([record(_zero_state())], bad)


def test_config_file(tmp_path):
    cfg_file = tmp_path / "run.ini"
    cfg_file.write_text(
        "[case]\nname = viscous_box\nre = 100\ncr = 0.1\nte = 0.25\ngrid = 32\n"
        "[sweep]\ngrids = 32, 64\nnorms = L1 L2\n"
        "[output]\ndir = results\nformat = csv\n"
        "[solver]\nmethod = gmres\n")
    cfg = load_config(cfg_file)
    assert cfg.case.n == 32 and cfg.case.nu == pytest.approx(0.01)
    assert cfg.case.cr == 0.1 and cfg.case.te == 0.25
    assert cfg.grids == (32, 64) and cfg.norms == ("L1", "L2")
    assert cfg.fmt == "csv" and cfg.solver == "gmres"
    assert str(cfg.out_dir) == "results"


def test_config_inline_comments(tmp_path):
    cfg_file = tmp_path / "run.ini"
    cfg_file.write_text("[case]\nname = viscous_box   ; the default case\ngrid = 16  # cells\n")
    cfg = load_config(cfg_file)
    assert cfg.case.name == "viscous_box" and cfg.case.n == 16


def test_config_profile():
    case = case_from_mapping({"name": "manufactured", "profile": "poly", "nu": "0.02"})
    assert case.profile == "poly" and case.nu == 0.02


@pytest.mark.parametrize("section", [
    {"name": "tumbling_box"},
    {"name": "viscous_box", "reynolds": "100"},
    {"name": "single_vortex", "re": "100"},
    {"name": "manufactured", "profile": "spiral"},
])
def test_config_rejects(section):
    with pytest.raises(ConfigurationError):
        case_from_mapping(section)


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.ini")


def test_cli_check_tableau(capsys):
    assert main(["check-tableau", "--expect-stable"]) == 0
    assert "stable=True" in capsys.readouterr().out
    assert main(["check-tableau", "--tableau", "rk4", "--expect-stable"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("FAIL reason=not_algebraically_stable")


def test_cli_run_with_oracle(tmp_path, capsys):
    rc = main(["run", "--grid", "16", "--te", "0.02", "--out", str(tmp_path),
               "--format", "csv", "--oracle"])
    out = capsys.readouterr().out
    assert rc == 0, out
    assert "oracle_gap=" in out
    assert (tmp_path / "viscous_box_16_diagnostics.csv").exists()
    assert (tmp_path / "viscous_box_16_fields.csv").exists()


def test_cli_errors_become_fail_lines(tmp_path, capsys):
    rc = main(["run", "--grid", "16", "--lambda", "-1", "--out", str(tmp_path)])
    assert rc == 1
    assert capsys.readouterr().err.startswith("FAIL reason=ConfigurationError")


def test_sweep_rejects_non_doubling(tmp_path):
    with pytest.raises(ValueError, match="factor of 2"):
        run_convergence_sweep(cases.viscous_box(16), [16, 24])
    out = tmp_path / "never"
    assert main(["sweep", "--grids", "16,48", "--te", "0.01", "--out", str(out)]) == 1
    assert not out.exists()


def test_sweep_table(tmp_path):
    table = run_convergence_sweep(cases.viscous_box(8, te=0.02), [8, 16, 32], ("L2",))
    assert table.header() == ["quantity", "norm", "1/8-1/16", "rate", "1/16-1/32"]
    assert len(table.rates(("u", "L2"))) == 1
    text = table.to_text()
    assert "div_u" in text
    rows = list(csv.reader(open(table.write_csv(tmp_path / "s.csv"))))
    assert len(rows) == 3


def test_runs_are_deterministic(tmp_path):
    case = cases.viscous_box(16, te=0.02)
    a = io.emit_diagnostics(run(case).records, tmp_path / "a.csv")
    b = io.emit_diagnostics(run(case).records, tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
