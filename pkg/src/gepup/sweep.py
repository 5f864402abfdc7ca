"""Grid-convergence sweeps with Richardson error estimates."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fvops
from .cases import CaseSpec
from .diagnostics import observed_order, richardson_error
from .grid import electric_bc
from .runner import RunResult, run

NORMS = {"Linf": np.inf, "L1": 1, "L2": 2}


@dataclass
class ConvergenceTable:
    grids: list[int]
    # rows[(quantity, norm)] = errors between adjacent grids
    rows: dict = field(default_factory=dict)
    results: list[RunResult] = field(default_factory=list)

    def rates(self, key) -> list[float]:
        e = self.rows[key]
        return [observed_order(a, b) for a, b in zip(e, e[1:])]

    def header(self) -> list[str]:
        cols = []
        pairs = [f"1/{a}-1/{b}" for a, b in zip(self.grids, self.grids[1:])]
        for m, p in enumerate(pairs):
            cols.append(p)
            if m < len(pairs) - 1:
                cols.append("rate")
        return ["quantity", "norm"] + cols

    def as_rows(self) -> list[list]:
        out = []
        for (q, n), errs in self.rows.items():
            rates = self.rates((q, n))
            row = [q, n]
            for m, e in enumerate(errs):
                row.append(e)
                if m < len(rates):
                    row.append(rates[m])
            out.append(row)
        return out

    def to_text(self) -> str:
        head = self.header()
        body = [[r[0], r[1]] + [f"{v:.2e}" if i % 2 == 0 else f"{v:.2f}"
                                for i, v in enumerate(r[2:])] for r in self.as_rows()]
        widths = [max(len(str(x)) for x in col) for col in zip(head, *body)]
        lines = ["  ".join(str(x).rjust(w) for x, w in zip(row, widths)) for row in [head] + body]
        return "\n".join(lines)

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.header())
            for r in self.as_rows():
                w.writerow(r[:2] + [f"{v:.17g}" for v in r[2:]])
        return path


def _quantities(res: RunResult) -> dict:
    st = res.state
    return {"u": st.U, "div_u": fvops.div(st.U, electric_bc())}


def run_convergence_sweep(case: CaseSpec, grids, norms=("Linf", "L1", "L2"),
                          u_bc: str = "noslip", progress=None) -> ConvergenceTable:
    """Run ``case`` on each grid and tabulate Richardson errors and rates."""
    grids = [int(n) for n in grids]
    if len(grids) < 2:
        raise ValueError("a sweep needs at least two grids")
    if any(b != 2 * a for a, b in zip(grids, grids[1:])):
        raise ValueError(f"grids must strictly refine by a factor of 2: {grids}")
    table = ConvergenceTable(grids)
    for n in grids:
        res = run(case.with_(n=n), u_bc=u_bc)
        table.results.append(res)
        if progress is not None:
            progress(n, res)
    qs = [_quantities(r) for r in table.results]
    for name in qs[0]:
        for norm_name in norms:
            p = NORMS[norm_name]
            table.rows[(name, norm_name)] = [
                richardson_error(c[name], f[name], p) for c, f in zip(qs, qs[1:])]
    return table
