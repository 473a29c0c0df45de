"""
From price series to a dependence graph
=======================================

Daily price series are coded as up (1) / not up (0) moves, thinned to
every fourth day to weaken serial correlation, and the penalty constant is
picked by 10-fold cross-validation before estimating the graph.

Real index data is not bundled; a synthetic market with a shared factor
stands in for it. Point ``load_price_series`` at a CSV (header of names, one
row per day) to use real prices.
"""

import numpy as np

from mrfse import binarize_series, cross_validate_c, estimate_graph, thin_sample
from mrfse.export import graph_to_dot

rng = np.random.default_rng(7)
names = ["north_a", "north_b", "north_c", "south_a", "south_b", "east"]
T = 2121
region = {"north": rng.normal(0, 0.01, T), "south": rng.normal(0, 0.01, T)}
returns = []
for nm in names:
    shared = region.get(nm.split("_")[0], 0.0)
    returns.append(shared + rng.normal(0, 0.008, T))
prices = {nm: 100 * np.exp(np.cumsum(r)) for nm, r in zip(names, returns)}

indicators = binarize_series(prices)
sample = thin_sample(indicators, 4)
print(f"{indicators.n} daily indicators -> {sample.n} thinned observations")

##############################################################################
# Choose c on a grid.

cv = cross_validate_c(sample, [0.05, 0.1, 0.2, 0.5, 1.0], folds=10, seed=0, mode="or")
for c, loss in zip(cv.grid, cv.mean_losses):
    print(f"c = {c:<5} mean held-out loss {loss:.5f}")
print("chosen c:", cv.chosen_c, "fold sizes:", sorted(set(cv.fold_sizes)))

##############################################################################
# Estimate with both rules.

for mode in ("and", "or"):
    g = estimate_graph(sample, cv.chosen_c, mode)
    print(f"{mode:>3}: {g.edge_names()}")

print(graph_to_dot(estimate_graph(sample, cv.chosen_c, "or")))
