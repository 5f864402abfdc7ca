"""Plain-text run configuration (INI sections of key = value pairs).

Example::

    [case]
    name = viscous_box
    re = 10000
    lambda = 1
    cr = 0.5
    t0 = 0
    te = 0.5
    grid = 64

    [sweep]
    grids = 64, 128, 256

    [output]
    dir = out
    format = vtk
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from . import cases
from .grid import ConfigurationError


@dataclass
class RunConfig:
    case: cases.CaseSpec = field(default_factory=lambda: cases.viscous_box(64))
    grids: tuple[int, ...] = (64, 128, 256)
    norms: tuple[str, ...] = ("Linf", "L1", "L2")
    out_dir: Path = Path("out")
    fmt: str = "vtk"
    u_bc: str = "noslip"
    solver: str = "direct"


_FLOAT_KEYS = {"nu": "nu", "lambda": "lam", "cr": "cr", "t0": "t0", "te": "te",
               "k": "k", "decay": "decay", "u_max": "u_max"}


def case_from_mapping(section) -> cases.CaseSpec:
    name = section.get("name", "viscous_box")
    factories = {"viscous_box": cases.viscous_box, "single_vortex": cases.single_vortex,
                 "manufactured": cases.manufactured}
    if name not in factories:
        raise ConfigurationError(f"unknown case {name!r}")
    kw = {}
    n = int(section.get("grid", 64))
    if "re" in section:
        if name != "viscous_box":
            raise ConfigurationError("re is only understood for the viscous box; set nu")
        kw["re"] = float(section["re"])
    for key, attr in _FLOAT_KEYS.items():
        if key in section:
            kw[attr] = float(section[key])
    if "projections" in section:
        kw["projections"] = int(section["projections"])
    if "profile" in section:
        kw["profile"] = section["profile"]
    known = set(_FLOAT_KEYS) | {"name", "grid", "re", "projections", "profile"}
    unknown = set(section) - known
    if unknown:
        raise ConfigurationError(f"unknown case keys: {sorted(unknown)}")
    return factories[name](n, **kw)


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    path = Path(path)
    if not parser.read(path):
        raise ConfigurationError(f"cannot read config file {path}")
    cfg = RunConfig()
    if parser.has_section("case"):
        cfg.case = case_from_mapping(dict(parser["case"]))
    if parser.has_section("sweep"):
        s = parser["sweep"]
        if "grids" in s:
            cfg.grids = tuple(int(v) for v in s["grids"].replace(",", " ").split())
        if "norms" in s:
            cfg.norms = tuple(s["norms"].replace(",", " ").split())
    if parser.has_section("output"):
        o = parser["output"]
        cfg.out_dir = Path(o.get("dir", str(cfg.out_dir)))
        cfg.fmt = o.get("format", cfg.fmt)
    if parser.has_section("solver"):
        s = parser["solver"]
        cfg.u_bc = s.get("u_bc", cfg.u_bc)
        cfg.solver = s.get("method", cfg.solver)
    return cfg
