"""Balance-sheet valuation with cross-holdings and overlapping portfolios.

Notation follows the usual cross-holding setup: ``C[i, j]`` is the fraction
of bank ``j`` owned by bank ``i``, ``D[i, k]`` the baseline holding of bank
``i`` in external asset class ``k`` and ``p`` the vector of price factors.
Total values solve ``V = D p + C V``; equity values are ``v = A D p`` with
the interdependency matrix ``A = diag(chat) (I - C)^-1``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    ColumnOverflow,
    DimensionMismatch,
    Insolvent,
    InputError,
    NonHollow,
    SingularSystem,
)

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
RESIDUAL_REFUSE = 1e-6


def _readonly(x, ndim):
    arr = np.array(x, dtype=float)
    if arr.ndim != ndim:
        raise DimensionMismatch(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FractionMatrix:
    """Cross-holding fractions with a hollow diagonal and column sums below one."""

    c: np.ndarray

    def __post_init__(self):
        c = _readonly(self.c, 2)
        if c.shape[0] != c.shape[1]:
            raise DimensionMismatch(f"cross-holding matrix must be square, got {c.shape}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise InputError("cross-holding fractions must be finite and nonnegative")
        if np.any(np.diag(c) != 0):
            raise NonHollow("cross-holding matrix must have a zero diagonal")
        colsum = c.sum(axis=0)
        bad = np.flatnonzero(colsum >= 1)
        if bad.size:
            raise ColumnOverflow(bad, colsum[bad], np.ones(bad.size))
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @cached_property
    def lu(self):
        """LU factors of ``I - C``, computed once and shared by all solves."""
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            try:
                return scipy.linalg.lu_factor(np.eye(self.n) - self.c)
            except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
                raise SingularSystem(f"I - C is singular: {exc}") from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``(I - C) x = rhs`` and check the relative residual."""
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.n:
            raise DimensionMismatch(f"right-hand side has {rhs.shape[0]} rows, expected {self.n}")
        x = scipy.linalg.lu_solve(self.lu, rhs)
        resid = np.max(np.abs(rhs - (x - self.c @ x)), initial=0.0)
        scale = np.max(np.abs(rhs), initial=0.0)
        rel = resid / scale if scale > 0 else resid
        if not np.isfinite(rel) or rel > RESIDUAL_REFUSE:
            raise SingularSystem(f"linear solve residual {rel:.3e} exceeds {RESIDUAL_REFUSE:g}")
        if rel > RESIDUAL_TOL:
            log.warning("linear solve residual %.3e above %.0e", rel, RESIDUAL_TOL)
        return x


@dataclass(frozen=True, eq=False)
class CapitalRatios:
    """Diagonal of the capital-ratio matrix and the external liability ratios."""

    chat: np.ndarray
    l_ext: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "chat", _readonly(self.chat, 1))
        object.__setattr__(self, "l_ext", _readonly(self.l_ext, 1))
        if self.chat.shape != self.l_ext.shape:
            raise DimensionMismatch("chat and l_ext lengths differ")

    @property
    def n(self) -> int:
        return self.chat.shape[0]


@dataclass(frozen=True, eq=False)
class PortfolioMatrix:
    """Nominal external holdings ``d`` (banks x classes) and price factors ``p``."""

    d: np.ndarray
    p: np.ndarray | None = None

    def __post_init__(self):
        d = _readonly(self.d, 2)
        p = _readonly(np.ones(d.shape[1]) if self.p is None else self.p, 1)
        if p.shape[0] != d.shape[1]:
            raise DimensionMismatch(f"{d.shape[1]} asset classes but {p.shape[0]} prices")
        if np.any(d < 0) or np.any(p < 0):
            raise InputError("holdings and prices must be nonnegative")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def m(self) -> int:
        return self.d.shape[1]

    @property
    def values(self) -> np.ndarray:
        """External asset value of each bank, ``D p``."""
        return self.d @ self.p


@dataclass(frozen=True, eq=False)
class InterdependencyMatrix:
    a: np.ndarray

    def __post_init__(self):
        a = _readonly(self.a, 2)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"interdependency matrix must be square, got {a.shape}")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.shape[0]


def to_fraction_matrix(x, v_total) -> FractionMatrix:
    """Convert nominal exposures to ownership fractions, ``C[i, j] = x[i, j] / V[j]``.

    Raises
    ------
    NonHollow
        If any diagonal entry of `x` is nonzero.
    ColumnOverflow
        If the interbank liabilities of some bank reach its total value.
    """
    x = np.asarray(x, dtype=float)
    v_total = np.asarray(v_total, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or v_total.shape != (x.shape[0],):
        raise DimensionMismatch(f"exposures {x.shape} do not match totals {v_total.shape}")
    if np.any(np.diag(x) != 0):
        raise NonHollow(f"nonzero diagonal exposures at {np.flatnonzero(np.diag(x)).tolist()}")
    if np.any(x < 0):
        raise InputError("exposures must be nonnegative")
    if np.any(v_total <= 0):
        raise InputError("total values must be positive")
    colsum = x.sum(axis=0)
    bad = np.flatnonzero(colsum >= v_total)
    if bad.size:
        raise ColumnOverflow(bad, colsum[bad], v_total[bad])
    return FractionMatrix(x / v_total[None, :])


def capital_ratios(c: FractionMatrix, l_ext) -> CapitalRatios:
    """Capital ratios ``chat_i = 1 - l_ext_i - sum_j C[j, i]``."""
    l_ext = np.asarray(l_ext, dtype=float)
    if l_ext.shape != (c.n,):
        raise DimensionMismatch(f"l_ext has shape {l_ext.shape}, expected ({c.n},)")
    if np.any(l_ext < 0) or np.any(l_ext >= 1):
        raise InputError("external liability ratios must lie in [0, 1)")
    chat = 1.0 - l_ext - c.c.sum(axis=0)
    bad = np.flatnonzero(chat <= 0)
    if bad.size:
        raise Insolvent(bad, chat[bad])
    return CapitalRatios(chat, l_ext)


def total_values(c: FractionMatrix, port: PortfolioMatrix) -> np.ndarray:
    """Total values ``V = (I - C)^-1 D p``."""
    if port.n != c.n:
        raise DimensionMismatch(f"{port.n} portfolio rows for {c.n} banks")
    return c.solve(port.values)


def interdependency(c: FractionMatrix, chat: CapitalRatios) -> InterdependencyMatrix:
    """Interdependency matrix ``A = diag(chat) (I - C)^-1``."""
    if chat.n != c.n:
        raise DimensionMismatch(f"{chat.n} capital ratios for {c.n} banks")
    inv = c.solve(np.eye(c.n))
    return InterdependencyMatrix(chat.chat[:, None] * inv)


def balance_sheet_equity(c: FractionMatrix, v_total, port: PortfolioMatrix, l_ext) -> np.ndarray:
    """Equity read off the balance sheet for given total values.

    ``v_i = sum_j C[i, j] V_j - sum_j C[j, i] V_i + (D p)_i - l_ext_i V_i``:
    interbank claims minus interbank liabilities plus external assets minus
    external liabilities.
    """
    v_total = np.asarray(v_total, dtype=float)
    l_ext = np.asarray(l_ext, dtype=float)
    cc = c.c
    return cc @ v_total - cc.sum(axis=0) * v_total + port.values - l_ext * v_total


def equity_values(a: InterdependencyMatrix, port: PortfolioMatrix, b=None) -> np.ndarray:
    """One-shot equity evaluation ``v = A (D p - b)`` for fixed failure costs `b`."""
    if port.n != a.n:
        raise DimensionMismatch(f"{port.n} portfolio rows for {a.n} banks")
    if b is None:
        return a.a @ port.values
    b = np.asarray(b, dtype=float)
    if b.shape != (a.n,):
        raise DimensionMismatch(f"failure costs have shape {b.shape}, expected ({a.n},)")
    if np.any(b < 0):
        raise InputError("failure costs must be nonnegative")
    return a.a @ (port.values - b)
