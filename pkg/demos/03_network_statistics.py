"""
Describing a reconstructed network
==================================

Link counts, degrees, clustering and concentration for the three
reconstructions of one set of marginals. The sparse greedy fill and the
maximum-entropy fill sit at opposite ends of every measure.
"""

import numpy as np

from contagion import Marginals, core_periphery_fit, network_statistics, reconstruct
from contagion.netstats import FIELDS

rng = np.random.default_rng(11)
x0 = rng.gamma(0.6, 50.0, (30, 30)) * (rng.uniform(size=(30, 30)) < 0.3)
np.fill_diagonal(x0, 0.0)
m = Marginals(x0.sum(axis=1), x0.sum(axis=0))

rows = {method: network_statistics(reconstruct(m, method, seed=0)).as_row() for method in ("anan", "hala", "maxe")}

print(f"{'statistic':26s}" + "".join(f"{k:>12s}" for k in rows))
for field in FIELDS:
    cells = []
    for row in rows.values():
        v = row[field]
        cells.append(f"{'undefined':>12s}" if v is None else f"{v:12.3f}")
    print(f"{field:26s}" + "".join(cells))

# tiny links can be dropped before counting
dense = reconstruct(m, "maxe")
for cut in (0.0, 1.0, 10.0):
    print(f"links above {cut:5.1f}:", network_statistics(dense, link_threshold=cut).links)

# the core of a star is its hub
star = np.zeros((6, 6))
star[0, 1:] = star[1:, 0] = 1.0
fit = core_periphery_fit(star)
print("star core:", sorted(fit.core), "error score:", fit.score)
