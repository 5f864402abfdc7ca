"""Desk-scale viscous-box convergence tables.

Runs the Re = 1e4 (Cr 0.5, grids 64/128/256) and Re = 100 (Cr 0.1,
grids 32/64/128) sweeps to t = 0.5 and writes each table as text and CSV.

    python3 scripts/convergence_tables.py --out tables
    python3 scripts/convergence_tables.py --only re100 --grids 16,32,64
"""

import argparse
import logging
from pathlib import Path

from gepup import cases
from gepup.sweep import run_convergence_sweep

SETUPS = {
    "re1e4": dict(re=1e4, cr=0.5, grids=(64, 128, 256)),
    "re100": dict(re=1e2, cr=0.1, grids=(32, 64, 128)),
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("tables"))
    p.add_argument("--only", choices=sorted(SETUPS))
    p.add_argument("--grids", type=lambda v: tuple(int(x) for x in v.split(",")),
                   help="override the grid sequence")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)
    for name, s in SETUPS.items():
        if args.only and name != args.only:
            continue
        grids = args.grids or s["grids"]
        case = cases.viscous_box(grids[0], re=s["re"], cr=s["cr"], te=0.5)
        table = run_convergence_sweep(
            case, grids, progress=lambda n, r: logging.info("%s: %d^2 done, %d steps", name, n, r.steps))
        text = table.to_text()
        print(f"\n{name}\n{text}")
        (args.out / f"{name}.txt").write_text(text + "\n")
        table.write_csv(args.out / f"{name}.csv")


if __name__ == "__main__":
    main()
