"""Failure hierarchies under a price shock.

Starting from no failures, each round charges every bank that failed in the
previous round a lump-sum cost ``beta * vbar_i`` and re-evaluates equity as
``A (D p' - b)``. Banks whose equity is strictly below their threshold
``vbar = theta * v0`` form the next failure set. Costs only grow and ``A`` is
nonnegative, so failure sets only grow and the loop stops within ``N + 1``
rounds at the least self-consistent failure set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError
from .model import InterdependencyMatrix, PortfolioMatrix


@dataclass(frozen=True, eq=False)
class ShockScenario:
    factors: np.ndarray
    label: str = ""

    def __post_init__(self):
        f = np.array(self.factors, dtype=float)
        if f.ndim != 1:
            raise DimensionMismatch(f"shock factors must be a vector, got shape {f.shape}")
        if not np.all(np.isfinite(f)) or np.any(f < 0):
            raise InputError("shock factors must be finite and nonnegative")
        f.setflags(write=False)
        object.__setattr__(self, "factors", f)

    @classmethod
    def unit(cls, m: int, label: str = "baseline") -> "ShockScenario":
        return cls(np.ones(m), label)


@dataclass(frozen=True, eq=False)
class FailureParams:
    """Threshold fraction, failure-cost coefficient and baseline equity.

    `beta` may be a scalar or a per-bank vector. `thresholds` overrides the
    default ``theta * v0`` rule bank by bank when given.
    """

    theta: float
    beta: float | np.ndarray
    v0: np.ndarray
    thresholds: np.ndarray | None = None

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise InputError(f"theta must lie in (0, 1], got {self.theta}")
        beta = np.asarray(self.beta, dtype=float)
        if np.any(beta < 0) or np.any(beta > 1):
            raise InputError(f"beta must lie in [0, 1], got {self.beta}")
        v0 = np.array(self.v0, dtype=float)
        if v0.ndim != 1 or np.any(v0 <= 0):
            raise InputError("baseline equity must be a positive vector")
        if beta.ndim and beta.shape != v0.shape:
            raise DimensionMismatch("per-bank beta does not match baseline equity")
        v0.setflags(write=False)
        object.__setattr__(self, "v0", v0)
        if self.thresholds is not None:
            t = np.array(self.thresholds, dtype=float)
            if t.shape != v0.shape:
                raise DimensionMismatch("threshold override does not match baseline equity")
            t.setflags(write=False)
            object.__setattr__(self, "thresholds", t)

    @property
    def vbar(self) -> np.ndarray:
        if self.thresholds is not None:
            return self.thresholds
        return failure_thresholds(self.v0, self.theta)

    @property
    def costs(self) -> np.ndarray:
        """Lump-sum loss ``beta_i * vbar_i`` charged once bank ``i`` has failed."""
        return np.asarray(self.beta, dtype=float) * self.vbar


@dataclass(frozen=True, eq=False)
class CascadeResult:
    """Failure sets ``Z_1 ... Z_T`` with the equity evaluated in each round.

    ``rounds[t - 1]`` is ``Z_t`` and ``equity_trace[t - 1]`` the vector
    ``A (D p' - b_{t-1})`` it was read from. The last two sets coincide.
    """

    rounds: tuple
    equity_trace: tuple
    thresholds: np.ndarray

    @property
    def terminated_at(self) -> int:
        return len(self.rounds)

    @property
    def failed(self) -> frozenset:
        return self.rounds[-1]

    @property
    def hierarchy(self) -> list:
        """Banks failing for the first time in each level, empty levels dropped."""
        levels = []
        prev = frozenset()
        for z in self.rounds:
            new = z - prev
            if new:
                levels.append(sorted(new))
            prev = z
        return levels

    def named_hierarchy(self, names) -> list:
        return [[names[i] for i in level] for level in self.hierarchy]


def failure_thresholds(v0, theta: float) -> np.ndarray:
    """``vbar = theta * v0``."""
    return theta * np.asarray(v0, dtype=float)


def apply_shock(port: PortfolioMatrix, shock: ShockScenario) -> PortfolioMatrix:
    if shock.factors.shape[0] != port.m:
        raise DimensionMismatch(f"{shock.factors.shape[0]} shock factors for {port.m} asset classes")
    return PortfolioMatrix(port.d, port.p * shock.factors)


def run_cascade(
    a: InterdependencyMatrix,
    port: PortfolioMatrix,
    shock: ShockScenario,
    params: FailureParams,
) -> CascadeResult:
    """Iterate failure sets until they stop changing.

    A bank fails when its equity is strictly below its threshold; equity
    exactly at the threshold survives.
    """
    n = a.n
    if port.n != n or params.v0.shape[0] != n:
        raise DimensionMismatch(
            f"{n} banks in A, {port.n} portfolio rows, {params.v0.shape[0]} baseline equities"
        )
    dp = apply_shock(port, shock).values
    vbar = params.vbar
    costs = params.costs * np.ones(n)
    failed = np.zeros(n, dtype=bool)
    rounds, trace = [], []
    while True:
        v = a.a @ (dp - np.where(failed, costs, 0.0))
        now = v - vbar < 0
        if np.any(failed & ~now):
            raise AssertionError(f"failure set shrank in round {len(rounds) + 1}")
        rounds.append(frozenset(np.flatnonzero(now).tolist()))
        trace.append(v)
        if np.array_equal(now, failed):
            break
        failed = now
    if len(rounds) > n + 1:
        raise AssertionError(f"cascade took {len(rounds)} rounds for {n} banks")
    return CascadeResult(tuple(rounds), tuple(trace), vbar)
