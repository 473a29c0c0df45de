"""
Constants behind strong consistency
===================================

For a known model, compute per vertex the smallest positive conditional
probability over subsets of its neighborhood (``p_min``), the smallest
expected divergence separating the neighborhood from its proper subsets
(``alpha_min``), and the penalty constant above which the estimator is
strongly consistent.
"""

from mrfse import builtin_model, theorem_constants, true_graph
from mrfse.simulation import p_min_set

for name in ("example3", "markov_chain_window(5)"):
    m = builtin_model(name)
    g = true_graph(m)
    print(f"\n{name}: edges {g.edge_names()}")
    print(f"{'vertex':>7} {'p_min':>9} {'alpha_min':>10} {'c >':>10}")
    for v in range(m.p):
        tc = theorem_constants(m, v)
        print(f"{m.vertices.names[v]:>7} {tc.p_min:9.4f} {tc.alpha_min:10.4f} {tc.c_threshold:10.2f}")
    pm = p_min_set(m, range(m.p))
    k = m.alphabet.size
    print(f"whole graph: p_min = {pm:.4f}, c > {k * k / (pm * (k - 1)):.2f}")

# The thresholds are large: they guarantee eventual almost-sure recovery,
# while any c > 0 is already consistent in probability.
