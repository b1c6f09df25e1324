"""
Valuing banks that own pieces of each other
===========================================

Three banks hold shares of one another's total value and a portfolio of
external assets. We compute total values, capital ratios and the
interdependency matrix, then check that equity from ``A D p`` agrees with
the balance sheet read line by line.
"""

import numpy as np

from contagion import (
    FractionMatrix,
    PortfolioMatrix,
    balance_sheet_equity,
    capital_ratios,
    equity_values,
    interdependency,
    total_values,
)

# C[i, j] is the fraction of bank j's total value held by bank i
c = FractionMatrix([
    [0.0, 0.20, 0.10],
    [0.15, 0.0, 0.05],
    [0.05, 0.10, 0.0],
])

# two external asset classes at unit prices
port = PortfolioMatrix([[60.0, 20.0], [30.0, 30.0], [10.0, 50.0]])
l_ext = np.array([0.55, 0.50, 0.60])

v_total = total_values(c, port)
print("total values V:", v_total.round(3))

# capital ratio: what is left of each unit of value after creditors and cross-holders
ratios = capital_ratios(c, l_ext)
print("capital ratios:", ratios.chat.round(4))

a = interdependency(c, ratios)
print("interdependency A:\n", a.a.round(4))

# equity two ways
v = equity_values(a, port)
direct = balance_sheet_equity(c, v_total, port, l_ext)
print("equity A D p     :", v.round(6))
print("equity from books:", direct.round(6))
print("max difference   :", np.abs(v - direct).max())

# without external liabilities nothing leaks out of the system
a_free = interdependency(c, capital_ratios(c, np.zeros(3)))
print("sum of equity vs sum of external assets:",
      equity_values(a_free, port).sum().round(9), port.values.sum())

# a lump-sum loss at bank 0 spreads through A
loss = np.array([10.0, 0.0, 0.0])
print("equity after a loss of 10 at bank 0:", equity_values(a, port, loss).round(3))
