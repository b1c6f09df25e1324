"""Interbank exposure reconstruction from aggregated claims.

Three methods fill an N x N hollow exposure matrix whose row sums are the
banks' interbank assets and whose column sums are their interbank
liabilities:

* ``anan`` - sparse, deterministic greedy fill (few links),
* ``hala`` - randomized iterative fill seeded by the caller,
* ``maxe`` - maximum entropy via hollow RAS (iterative proportional fitting).

Rows are lenders (claim holders), columns are borrowers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InfeasibleMarginals, InputError, NotConverged

METHODS = ("anan", "hala", "maxe")

# residual mass below DUST * total is treated as exhausted by the fills
DUST = 1e-12


@dataclass(frozen=True, eq=False)
class Marginals:
    """Aggregated interbank assets ``a`` (row sums) and liabilities ``l`` (column sums)."""

    a: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        l = np.array(self.l, dtype=float)
        if a.ndim != 1 or a.shape != l.shape:
            raise DimensionMismatch(f"marginal shapes differ: {a.shape} vs {l.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(l))):
            raise InputError("marginals must be finite")
        if np.any(a < 0) or np.any(l < 0):
            raise InputError("marginals must be nonnegative")
        sa, sl = a.sum(), l.sum()
        if abs(sa - sl) > 1e-9 * max(sa, sl):
            raise InputError(f"total assets {sa:g} differ from total liabilities {sl:g}")
        a.setflags(write=False)
        l.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "l", l)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def total(self) -> float:
        return float(self.a.sum())

    def hollow_feasible(self) -> bool:
        """True when some hollow nonnegative matrix has these marginals.

        With a zero diagonal a bank can only lend to, and borrow from, the
        others, so ``a_i <= S - l_i`` is necessary; for bipartite transport
        with one forbidden cell per row it is also sufficient.
        """
        s = self.total
        return bool(np.all(self.a + self.l <= s * (1 + 1e-12)))

    def check_feasible(self):
        if not self.hollow_feasible():
            bad = np.flatnonzero(self.a + self.l > self.total * (1 + 1e-12))
            raise InfeasibleMarginals(
                f"banks {bad.tolist()} hold more than the rest of the system can absorb "
                "(a_i + l_i exceeds total interbank volume)",
                a=self.a,
                l=self.l,
            )


@dataclass(frozen=True, eq=False)
class ExposureMatrix:
    x: np.ndarray
    method: str
    seed: int | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise DimensionMismatch(f"exposure matrix must be square, got {x.shape}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def links(self) -> int:
        off = ~np.eye(self.n, dtype=bool)
        return int(np.count_nonzero((self.x > 0) & off))

    def scaled(self, kappa: float) -> "ExposureMatrix":
        return ExposureMatrix(self.x * kappa, self.method, self.seed, dict(self.info))


@dataclass(frozen=True)
class MarginalReport:
    row_residuals: np.ndarray
    col_residuals: np.ndarray
    tol: float

    @property
    def max_residual(self) -> float:
        return float(max(self.row_residuals.max(initial=0.0), self.col_residuals.max(initial=0.0)))

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def _relative(sums, target, total):
    denom = np.where(target > 0, target, total if total > 0 else 1.0)
    return np.abs(sums - target) / denom


def validate_marginals(x, m: Marginals, tol: float = 1e-8) -> MarginalReport:
    """Per-bank relative residuals of the row and column sums of `x`.

    A bank with a zero marginal is measured against the total volume instead
    of its own (zero) figure.
    """
    x = x.x if isinstance(x, ExposureMatrix) else np.asarray(x, dtype=float)
    if x.shape != (m.n, m.n):
        raise DimensionMismatch(f"matrix {x.shape} does not match {m.n} marginals")
    s = m.total
    return MarginalReport(
        _relative(x.sum(axis=1), m.a, s),
        _relative(x.sum(axis=0), m.l, s),
        tol,
    )


def _max_residual(x, a, l):
    s = a.sum()
    return max(
        _relative(x.sum(axis=1), a, s).max(initial=0.0),
        _relative(x.sum(axis=0), l, s).max(initial=0.0),
    )


def hollow_ras(seed, a, l, tol=1e-10, max_iter=10_000):
    """Alternate row and column scaling of `seed` towards marginals ``a``, ``l``.

    The diagonal of the seed is zeroed first; scaling is multiplicative so
    it stays zero. Returns ``(x, residual, iterations)``.

    Raises
    ------
    NotConverged
        If the residual is still above `tol` after `max_iter` sweeps.
    """
    x = np.array(seed, dtype=float)
    np.fill_diagonal(x, 0.0)
    a = np.asarray(a, dtype=float)
    l = np.asarray(l, dtype=float)
    resid = _max_residual(x, a, l)
    it = 0
    while resid > tol:
        if it >= max_iter:
            raise NotConverged(resid, it)
        rs = x.sum(axis=1)
        x *= np.divide(a, rs, out=np.zeros_like(a), where=rs > 0)[:, None]
        cs = x.sum(axis=0)
        x *= np.divide(l, cs, out=np.zeros_like(l), where=cs > 0)[None, :]
        resid = _max_residual(x, a, l)
        it += 1
    return x, resid, it


def reconstruct_maxe(m: Marginals, tol: float = 1e-10, max_iter: int = 10_000) -> ExposureMatrix:
    """Maximum-entropy reconstruction.

    Starts from ``Q[i, j] = a_i l_j`` with a zero diagonal and applies hollow
    RAS until every per-bank relative residual is at most `tol`. The result
    is dense: every admissible pair with ``a_i > 0`` and ``l_j > 0`` gets a
    strictly positive exposure.
    """
    if m.total == 0:
        return ExposureMatrix(np.zeros((m.n, m.n)), "maxe", info={"iterations": 0})
    m.check_feasible()
    # scale the prior to unit mass so large figures do not overflow the product
    q = np.outer(m.a / m.total, m.l / m.total)
    x, resid, it = hollow_ras(q, m.a, m.l, tol=tol, max_iter=max_iter)
    return ExposureMatrix(x, "maxe", info={"iterations": it, "residual": resid})


def reconstruct_hala(m: Marginals, seed: int, eps: float = 1e-6) -> ExposureMatrix:
    """Randomized iterative fill followed by a proportional cleanup.

    Each step draws an ordered pair ``(i, j)``, ``i != j``, uniformly among
    pairs whose lender still has unplaced assets and whose borrower still has
    unplaced liabilities, then places ``f * min(a_i, l_j)`` with ``f`` uniform
    on (0, 1). Filling stops once the unplaced mass is at most ``eps`` of the
    total, or earlier if the only open pair left is a bank with itself; the
    remainder is spread by maximum entropy on the residual marginals.
    """
    n = m.n
    x = np.zeros((n, n))
    total = m.total
    if total == 0:
        return ExposureMatrix(x, "hala", seed=seed, info={"steps": 0})
    m.check_feasible()
    rng = np.random.default_rng(seed)
    a_rem = m.a.copy()
    l_rem = m.l.copy()
    dust = DUST * total
    steps = 0
    dead_end = False
    while a_rem.sum() > eps * total:
        # remainders at dust level count as exhausted; a fraction f < 1 of
        # min(a_i, l_j) never reaches zero exactly
        rows = np.flatnonzero(a_rem > dust)
        cols = np.flatnonzero(l_rem > dust)
        if rows.size * cols.size - np.intersect1d(rows, cols).size == 0:
            dead_end = True
            break
        i = rows[rng.integers(rows.size)]
        j = cols[rng.integers(cols.size)]
        if i == j:
            continue
        f = rng.random()
        while f == 0.0:
            f = rng.random()
        w = f * min(a_rem[i], l_rem[j])
        x[i, j] += w
        a_rem[i] -= w
        l_rem[j] -= w
        steps += 1

    leftover = float(a_rem.sum())
    a_rem = np.where(a_rem > dust, a_rem, 0.0)
    l_rem = np.where(l_rem > dust, l_rem, 0.0)
    cleanup = "none"
    if a_rem.sum() > 0 and l_rem.sum() > 0:
        l_rem *= a_rem.sum() / l_rem.sum()
        cleanup = "full"
        if np.all(a_rem + l_rem <= a_rem.sum() * (1 + 1e-12)):
            try:
                fill, _, _ = hollow_ras(np.outer(a_rem, l_rem) / a_rem.sum() ** 2, a_rem, l_rem)
                x += fill
                cleanup = "residual"
            except NotConverged:
                pass
        if cleanup == "full":
            # residual mass sits on one bank's own row and column; rebalance the
            # whole matrix instead, seeding every admissible pair
            x, _, _ = hollow_ras(x + np.outer(a_rem, l_rem) / total, m.a, m.l)
    resid = _max_residual(x, m.a, m.l)
    if resid > 1e-6:
        raise NotConverged(resid, steps)
    return ExposureMatrix(
        x, "hala", seed=seed,
        info={
            "steps": steps, "unplaced": leftover / total, "dead_end": dead_end,
            "cleanup": cleanup, "residual": resid,
        },
    )


def _slack_cap(slack):
    """Largest amount pair ``(i, j)`` may take without stranding mass.

    Placing ``w`` on ``(i, j)`` lowers the total by ``w`` but leaves every
    other bank ``k`` untouched, so hollow feasibility ``a_k + l_k <= S``
    survives only if ``w`` stays within the slack ``S - a_k - l_k`` of all
    ``k`` not in ``{i, j}``. Only the three smallest slacks matter.
    """
    n = slack.shape[0]
    if n <= 2:
        return np.full((n, n), np.inf)
    k0, k1, k2 = np.argsort(slack, kind="stable")[:3]
    idx = np.arange(n)
    t0 = idx == k0
    t1 = idx == k1
    touch0 = t0[:, None] | t0[None, :]
    touch1 = t1[:, None] | t1[None, :]
    return np.where(touch0, np.where(touch1, slack[k2], slack[k1]), slack[k0])


def reconstruct_anan(m: Marginals) -> ExposureMatrix:
    """Sparse greedy reconstruction.

    Repeatedly picks the admissible pair with the largest placeable amount
    ``min(a_i, l_j)``, places it and retires the exhausted side. Ties go to
    the pair with the least combined slack ``S - a_k - l_k``, then to the
    lowest ``(i, j)``. The amount is capped so that the unplaced marginals stay
    hollow-feasible; a capped placement makes some bank critical, after
    which every remaining link must touch it.

    Raises
    ------
    InfeasibleMarginals
        If the marginals admit no hollow matrix.
    """
    n = m.n
    x = np.zeros((n, n))
    total = m.total
    if total == 0:
        return ExposureMatrix(x, "anan", info={"steps": 0})
    m.check_feasible()
    a_rem = m.a.copy()
    l_rem = m.l.copy()
    dust = DUST * total
    a_rem[a_rem <= dust] = 0.0
    l_rem[l_rem <= dust] = 0.0
    diag = np.eye(n, dtype=bool)
    steps = 0
    while True:
        slack = a_rem.sum() - a_rem - l_rem
        slack[slack <= dust] = 0.0
        amount = np.minimum(np.minimum.outer(a_rem, l_rem), _slack_cap(slack))
        amount[diag] = 0.0
        w = amount.max()
        if w <= 0:
            break
        # among equal amounts serve the banks with the least room off the diagonal
        tight = np.where(amount == w, slack[:, None] + slack[None, :], np.inf)
        i, j = divmod(int(np.argmin(tight)), n)
        x[i, j] += w
        a_rem[i] -= w
        l_rem[j] -= w
        if a_rem[i] <= dust:
            a_rem[i] = 0.0
        if l_rem[j] <= dust:
            l_rem[j] = 0.0
        steps += 1
    if a_rem.sum() > 0 or l_rem.sum() > 0:
        raise InfeasibleMarginals(
            "greedy fill left mass that only fits on the diagonal: "
            f"assets {a_rem.tolist()}, liabilities {l_rem.tolist()}",
            a=a_rem,
            l=l_rem,
        )
    return ExposureMatrix(x, "anan", info={"steps": steps})


def reconstruct(m: Marginals, method: str, seed: int | None = None) -> ExposureMatrix:
    """Dispatch to one of :data:`METHODS`."""
    if method == "maxe":
        return reconstruct_maxe(m)
    if method == "hala":
        return reconstruct_hala(m, 0 if seed is None else seed)
    if method == "anan":
        return reconstruct_anan(m)
    raise InputError(f"unknown reconstruction method {method!r}; expected one of {METHODS}")
