"""Butcher tableaux, the algebraic-stability test and cubic stage extrapolation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import ConfigurationError


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    name: str = ""

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        s = b.size
        if A.shape != (s, s) or c.size != s:
            raise ConfigurationError("inconsistent tableau dimensions")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if not np.allclose(A.sum(axis=1), c, rtol=0, atol=1e-12):
            warnings.warn(f"tableau {self.name!r}: c differs from row sums of A")

    @property
    def s(self) -> int:
        return self.b.size

    @property
    def is_explicit(self) -> bool:
        return bool(np.all(np.triu(self.A) == 0.0))

    @property
    def is_sdirk(self) -> bool:
        d = np.diag(self.A)
        return bool(np.all(np.triu(self.A, 1) == 0.0) and d[0] != 0.0 and np.all(d == d[0]))

    @property
    def gamma(self) -> float:
        if not self.is_sdirk:
            raise ConfigurationError(f"tableau {self.name!r} is not SDIRK")
        return float(self.A[0, 0])

    def permuted(self, perm: Sequence[int]) -> "ButcherTableau":
        p = np.asarray(perm)
        return ButcherTableau(self.A[np.ix_(p, p)], self.b[p], self.c[p], self.name)


def sdirk43() -> ButcherTableau:
    """Three-stage, fourth-order, algebraically stable SDIRK method."""
    g = math.cos(math.pi / 18.0) / math.sqrt(3.0) + 0.5
    mu = 1.0 / (6.0 * (2.0 * g - 1.0) ** 2)
    A = [[g, 0.0, 0.0],
         [0.5 - g, g, 0.0],
         [2.0 * g, 1.0 - 4.0 * g, g]]
    return ButcherTableau(A, [mu, 1.0 - 2.0 * mu, mu], [g, 0.5, 1.0 - g], "sdirk43")


def rk4() -> ButcherTableau:
    A = [[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]]
    return ButcherTableau(A, [1 / 6, 1 / 3, 1 / 3, 1 / 6], [0, 0.5, 0.5, 1], "rk4")


def implicit_midpoint() -> ButcherTableau:
    return ButcherTableau([[0.5]], [1.0], [0.5], "implicit midpoint")


def gauss_legendre2() -> ButcherTableau:
    r = math.sqrt(3.0) / 6.0
    A = [[0.25, 0.25 - r], [0.25 + r, 0.25]]
    return ButcherTableau(A, [0.5, 0.5], [0.5 - r, 0.5 + r], "gauss2")


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    min_b: float
    min_eig_M: float
    M: np.ndarray


def stability_matrix(t: ButcherTableau) -> np.ndarray:
    bA = t.b[:, None] * t.A
    return bA + bA.T - np.outer(t.b, t.b)


def is_algebraically_stable(t: ButcherTableau, tol: float = 1e-12) -> StabilityReport:
    M = stability_matrix(t)
    min_eig = float(np.linalg.eigvalsh(M).min())
    min_b = float(t.b.min())
    return StabilityReport(min_b >= -tol and min_eig >= -tol, min_b, min_eig, M)


def lagrange_weights(nodes: Sequence[float], target: float) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=float)
    if len(set(nodes.tolist())) != nodes.size:
        raise ConfigurationError(f"duplicate extrapolation nodes {nodes.tolist()}")
    w = np.ones(nodes.size)
    for j, cj in enumerate(nodes):
        for l, cl in enumerate(nodes):
            if l != j:
                w[j] *= (target - cl) / (cj - cl)
    return w


STARTUP_NODES = (0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0)
STEADY_NODES = (-2.0, -1.0, 0.0, 1.0)


@dataclass
class StageHistory:
    """Four samples of (U, W) at node offsets measured in units of the step."""

    nodes: tuple[float, ...]
    u: list
    w: list

    def __post_init__(self):
        if len(self.nodes) != 4 or len(self.u) != 4 or len(self.w) != 4:
            raise ConfigurationError("stage history needs exactly 4 samples")
        if any(b <= a for a, b in zip(self.nodes, self.nodes[1:])):
            raise ConfigurationError("history node times must increase strictly")


def extrapolate(samples: Sequence, nodes: Sequence[float], targets: Sequence[float]) -> list:
    """Evaluate the cubic through ``samples`` at each target offset."""
    if len(samples) != 4:
        raise ConfigurationError("cubic extrapolation needs exactly 4 samples")
    out = []
    for c in targets:
        w = lagrange_weights(nodes, c)
        acc = samples[0] * w[0]
        for wj, f in zip(w[1:], samples[1:]):
            acc = acc + f * wj
        out.append(acc)
    return out
