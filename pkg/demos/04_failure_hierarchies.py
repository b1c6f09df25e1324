"""
Who fails first, and who follows
================================

A price shock lowers external portfolios. Banks whose equity drops below a
fraction of its starting level fail and incur a lump-sum cost that the
interdependency matrix passes on to everyone else, which can push a second
group over the edge.
"""

import numpy as np

from contagion import (
    FailureParams,
    FractionMatrix,
    PortfolioMatrix,
    ShockScenario,
    capital_ratios,
    equity_values,
    interdependency,
    run_cascade,
)

names = ["North", "South", "East", "West"]
c = FractionMatrix([
    [0.0, 0.30, 0.05, 0.05],
    [0.05, 0.0, 0.05, 0.05],
    [0.05, 0.05, 0.0, 0.25],
    [0.05, 0.05, 0.05, 0.0],
])
l_ext = np.array([0.5, 0.6, 0.5, 0.55])
a = interdependency(c, capital_ratios(c, l_ext))

# bank South is loaded with the asset class that gets hit
port = PortfolioMatrix([[50.0, 50.0], [90.0, 10.0], [40.0, 60.0], [30.0, 70.0]])
v0 = equity_values(a, port)
shock = ShockScenario([0.93, 1.0], "first class down 7%")

for theta in (0.95, 0.97):
    for beta in (0.3, 0.8):
        res = run_cascade(a, port, shock, FailureParams(theta, beta, v0))
        levels = res.named_hierarchy(names) or "no failures"
        print(f"theta {theta}, beta {beta}: {levels} after {res.terminated_at} rounds")

# equity round by round relative to the thresholds
res = run_cascade(a, port, shock, FailureParams(0.97, 0.8, v0))
for t, v in enumerate(res.equity_trace, 1):
    print(f"round {t}: equity / threshold =", (v / res.thresholds).round(4))
