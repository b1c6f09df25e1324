"""Summary statistics for interbank exposure networks.

Link-based statistics work on the binarized graph (an entry counts as a
link when it exceeds ``link_threshold``); concentration statistics work on
the exposure shares. Neither depends on the overall scale of the matrix.
"""

from __future__ import annotations

import statistics
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch, InputError
from .reconstruct import ExposureMatrix

# column order of the statistics table
FIELDS = (
    "links",
    "density_pct",
    "avg_degree",
    "med_degree",
    "assortativity",
    "clustering_pct",
    "lender_dependency_pct",
    "borrower_dependency_pct",
    "hhi_assets_mean",
    "hhi_assets_median",
    "hhi_liabilities_mean",
    "hhi_liabilities_median",
    "core_size_pct",
)


class EmptyNetworkWarning(UserWarning):
    """Statistics were requested for a network without links."""


@dataclass(frozen=True)
class NetworkStats:
    links: int
    density_pct: float
    avg_degree: float
    med_degree: float
    assortativity: float | None
    clustering_pct: float
    lender_dependency_pct: float
    borrower_dependency_pct: float
    hhi_assets_mean: float
    hhi_assets_median: float
    hhi_liabilities_mean: float
    hhi_liabilities_median: float
    core_size_pct: float

    def as_row(self) -> dict:
        """Plain-Python values in table order; undefined assortativity is ``None``."""
        return {k: v for k, v in asdict(self).items()}


@dataclass(frozen=True)
class CorePeripheryFit:
    core: frozenset
    score: int
    n: int

    @property
    def core_size_pct(self) -> float:
        return 100.0 * len(self.core) / self.n if self.n else 0.0


def _weights(x, link_threshold):
    x = x.x if isinstance(x, ExposureMatrix) else np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"exposure matrix must be square, got {x.shape}")
    if np.any(x < 0):
        raise InputError("exposures must be nonnegative")
    if link_threshold < 0:
        raise InputError("link_threshold must be nonnegative")
    w = np.where(x > link_threshold, x, 0.0)
    np.fill_diagonal(w, 0.0)
    return w


def binarize(x, link_threshold: float = 0.0) -> np.ndarray:
    """Directed adjacency: ``True`` where an off-diagonal entry exceeds the threshold."""
    return _weights(x, link_threshold) > 0


def degree_assortativity(adj: np.ndarray) -> float | None:
    """Pearson correlation of the degrees at both ends of each undirected edge.

    Returns ``None`` when the graph has no edges or all edge ends share one degree.
    """
    und = (adj | adj.T).astype(float)
    k = und.sum(axis=1)
    m2 = k.sum()  # each edge counted from both ends
    if m2 == 0:
        return None
    # over both orientations of every edge: sum k_i = sum k^2, sum k_i^2 = sum k^3
    mean = (k @ k) / m2
    var = (k**3).sum() / m2 - mean**2
    if var <= 1e-12 * mean**2:
        return None
    cov = (k @ und @ k) / m2 - mean**2
    return float(np.clip(cov / var, -1.0, 1.0))


def transitivity(adj: np.ndarray) -> float:
    """Global clustering: closed triads over connected triads of the undirected graph."""
    g = (adj | adj.T).astype(float)
    k = g.sum(axis=1)
    triads = float((k * (k - 1)).sum())
    if triads == 0:
        return 0.0
    return float(np.trace(g @ g @ g) / triads)


def core_periphery_score(adj: np.ndarray, core) -> int:
    """Discrete error of a core/periphery split of a directed network.

    Counts missing core-core links, present periphery-periphery links, and,
    when the periphery is nonempty, each core bank that lends to no
    periphery bank and each that borrows from none.
    """
    c = np.zeros((1, adj.shape[0]))
    c[0, list(core)] = 1.0
    return int(_scores(np.asarray(adj, dtype=float), c)[0])


def _scores(b, masks, both=None, colsum=None):
    """Error scores for a batch of 0/1 core masks (one per row).

    `both` (``[b | b.T]``) and `colsum` may be passed in when scoring many
    batches on the same network.
    """
    n = b.shape[0]
    if both is None:
        both = np.hstack([b, b.T])
        colsum = b.sum(axis=0)
    nc = masks.sum(axis=1)
    # links from the periphery into each bank, then from each bank to the periphery
    to_from = (1 - masks) @ both
    in_p = to_from[:, :n]
    in_core = (in_p * masks).sum(axis=1)
    cc = masks @ colsum - in_core
    pp = in_p.sum(axis=1) - in_core
    uncovered = ((to_from[:, :n] == 0) * masks).sum(axis=1) + ((to_from[:, n:] == 0) * masks).sum(axis=1)
    mixed = (nc > 0) & (nc < n)
    return nc * (nc - 1) - cc + pp + np.where(mixed, uncovered, 0)


def core_periphery_fit(x, link_threshold: float = 0.0) -> CorePeripheryFit:
    """Fit a core/periphery split by greedy prefix choice plus local moves.

    Banks are ranked by total degree (lowest index first on ties); the best
    top-k prefix becomes the initial core, preferring the larger core on
    equal scores. Single flips and core/periphery exchanges are then applied
    while one strictly lowers the score; the first best move in index order
    wins.
    """
    return _core_fit(binarize(x, link_threshold))


def _core_fit(adj):
    # scores are small integers, exact in single precision
    b = adj.astype(np.float32)
    n = b.shape[0]
    deg = adj.sum(axis=0) + adj.sum(axis=1)
    rank = np.empty(n, dtype=int)
    rank[np.argsort(-deg, kind="stable")] = np.arange(n)
    # row k holds the k highest-degree banks
    prefixes = (rank[None, :] < np.arange(n + 1)[:, None]).astype(np.float32)
    both, colsum = np.hstack([b, b.T]), b.sum(axis=0)
    s = _scores(b, prefixes, both, colsum)
    k = int(np.flatnonzero(s == s.min())[-1])
    c, best = prefixes[k], s[k]
    eye = np.eye(n, dtype=np.float32)
    while True:
        ins, outs = np.flatnonzero(c), np.flatnonzero(c == 0)
        # every single flip, then every exchange of a core bank for a periphery bank
        swaps = (c - eye[ins][:, None, :] + eye[outs][None, :, :]).reshape(-1, n)
        cand = np.vstack([np.abs(c - eye), swaps])
        s = _scores(b, cand, both, colsum)
        i = int(np.argmin(s))
        if s[i] >= best:
            break
        c, best = cand[i], s[i]
    return CorePeripheryFit(frozenset(np.flatnonzero(c).tolist()), int(best), n)


def _share_stats(w):
    tot = w.sum(axis=1)
    keep = tot > 0
    if not keep.any():
        return 0.0, 0.0, 0.0
    shares = w[keep] / tot[keep, None]
    hhi = (shares**2).sum(axis=1)
    return 100.0 * float(shares.max(axis=1).mean()), float(hhi.mean()), float(statistics.median(hhi.tolist()))


def network_statistics(x, link_threshold: float = 0.0) -> NetworkStats:
    """Link, degree, clustering, dependency, concentration and core statistics.

    Parameters
    ----------
    x : ExposureMatrix or array_like
        Hollow nonnegative exposures, lenders in rows.
    link_threshold : float
        Entries at or below this value are treated as absent.
    """
    w = _weights(x, link_threshold)
    n = w.shape[0]
    adj = w > 0
    links = int(adj.sum())
    if links == 0:
        warnings.warn("network has no links; statistics reported as zeros", EmptyNetworkWarning, stacklevel=2)
        return NetworkStats(0, 0.0, 0.0, 0.0, None, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    lend_dep, hhi_a_mean, hhi_a_med = _share_stats(w)
    borr_dep, hhi_l_mean, hhi_l_med = _share_stats(w.T)
    return NetworkStats(
        links=links,
        density_pct=100.0 * links / (n * (n - 1)),
        avg_degree=links / n,
        med_degree=float(statistics.median(adj.sum(axis=1).tolist())),
        assortativity=degree_assortativity(adj),
        clustering_pct=100.0 * transitivity(adj),
        lender_dependency_pct=lend_dep,
        borrower_dependency_pct=borr_dep,
        hhi_assets_mean=hhi_a_mean,
        hhi_assets_median=hhi_a_med,
        hhi_liabilities_mean=hhi_l_mean,
        hhi_liabilities_median=hhi_l_med,
        core_size_pct=_core_fit(adj).core_size_pct,
    )
