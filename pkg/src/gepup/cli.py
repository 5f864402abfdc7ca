"""Command line entry point: ``gepup run | sweep | check-tableau``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .config import RunConfig, load_config
from .runner import run
from .sweep import run_convergence_sweep
from .tableau import is_algebraically_stable, rk4, sdirk43

ORACLE_TOL = 1e-10


def _fail(reason: str, **fields) -> int:
    extra = " ".join(f"{k}={v}" for k, v in fields.items())
    print(f"FAIL reason={reason} {extra}".rstrip(), file=sys.stderr)
    return 1


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.grid is not None:
        overrides["n"] = args.grid
    if args.te is not None:
        overrides["te"] = args.te
    if args.lam is not None:
        overrides["lam"] = args.lam
    if args.cr is not None:
        overrides["cr"] = args.cr
    if overrides:
        cfg.case = cfg.case.with_(**overrides)
    if args.out is not None:
        cfg.out_dir = Path(args.out)
    if args.format is not None:
        cfg.fmt = args.format
    return cfg


def cmd_run(args) -> int:
    cfg = _config(args)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)

    def progress(n, total, rec):
        logging.info("step %d/%d t=%.6g E_h=%.12g |r-1|=%.2e", n, total, rec.t, rec.E_h, rec.sav_dev)

    res = run(cfg.case, u_bc=cfg.u_bc, solver_method=cfg.solver, oracle=args.oracle,
              progress=progress)
    stem = f"{cfg.case.name}_{cfg.case.n}"
    io.emit_diagnostics(res.records, cfg.out_dir / f"{stem}_diagnostics.csv")
    ext = "vtk" if cfg.fmt == "vtk" else "csv"
    io.emit_fields(res.state, cfg.out_dir / f"{stem}_fields.{ext}", cfg.fmt)
    print(f"steps={res.steps} k={res.k:.17g} t={res.state.t:.17g} "
          f"E_h={res.records[-1].E_h:.17g} sav_dev={res.records[-1].sav_dev:.3e}")
    if args.oracle:
        print(f"oracle_gap={res.oracle_gap:.3e}")
        if not res.oracle_gap <= ORACLE_TOL:
            return _fail("oracle_mismatch", gap=f"{res.oracle_gap:.3e}", tol=ORACLE_TOL)
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    grids = args.grids or cfg.grids
    table = run_convergence_sweep(cfg.case, grids, cfg.norms, u_bc=cfg.u_bc,
                                  progress=lambda n, r: logging.info("grid %d done (%d steps)", n, r.steps))
    text = table.to_text()
    print(text)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{cfg.case.name}_sweep"
    table.write_csv(cfg.out_dir / f"{stem}.csv")
    (cfg.out_dir / f"{stem}.txt").write_text(text + "\n")
    return 0


def cmd_check_tableau(args) -> int:
    tabs = {"sdirk43": sdirk43, "rk4": rk4}
    rep = is_algebraically_stable(tabs[args.tableau]())
    print(f"tableau={args.tableau} stable={rep.stable} min_b={rep.min_b:.17g} "
          f"min_eig_M={rep.min_eig_M:.17g}")
    if args.expect_stable and not rep.stable:
        return _fail("not_algebraically_stable", tableau=args.tableau)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gepup", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--te", type=float)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--cr", type=float)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--format", choices=("vtk", "csv"))

    r = sub.add_parser("run", help="integrate one case")
    common(r)
    r.add_argument("--oracle", action="store_true",
                   help="cross-check the first step against the fixed-point oracle")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="grid convergence table")
    common(s)
    s.add_argument("--grids", type=lambda v: [int(x) for x in v.split(",")])
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("check-tableau", help="algebraic stability report")
    c.add_argument("--tableau", choices=("sdirk43", "rk4"), default="sdirk43")
    c.add_argument("--expect-stable", action="store_true")
    c.set_defaults(func=cmd_check_tableau)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - converted to a failure line
        return _fail(type(exc).__name__, message=repr(str(exc)))


if __name__ == "__main__":
    sys.exit(main())
