"""Compare forms: resolvent domination, Silverstein extensions, maximality.

A form dominates another when its resolvent lies above in the pointwise
order: |G_alpha f| <= G~_alpha |f|.  On a finite vertex set this is an
entrywise matrix comparison, and it is equivalent to an order-ideal condition
on the domains plus a cone inequality that a stiffness-coefficient comparison
decides exactly.  A dominating extension is a Silverstein extension.

The main part is the maximal dominating form: no dominating candidate can
fall below it anywhere.
"""

import numpy as np

from graphforms import (
    FormPair,
    assemble,
    check_resolvent_domination,
    check_silverstein,
    make_path,
    verify_maximality,
)
from graphforms.corpus import induced_active_graph, saturating_exhaustion
from graphforms.graph import WeightedGraph

graph = make_path(5, 0.5)
dirichlet = assemble(graph, boundary=["v0", "v4"])
neumann = assemble(graph)

rep = check_silverstein(FormPair(lower=dirichlet, upper=neumann))
print("Dirichlet form vs its Neumann relaxation:")
print(f"  resolvent domination: {rep.resolvent_ok}")
print(f"  order ideal:          {rep.ideal_ok}")
print(f"  cone inequality:      {rep.inequality.ok} ({rep.inequality.method})")
print(f"  extension:            {rep.extension_ok}")
print(f"  Silverstein:          {rep.silverstein}")

# The reversed pair fails: a Dirichlet form cannot dominate its relaxation.
ok, worst = check_resolvent_domination(FormPair(lower=neumann, upper=dirichlet))
print(f"\nreversed pair dominates: {ok} "
      f"(worst violation {worst['violation']:.3e} at alpha={worst['alpha']:g})")

# Growing an edge weight breaks domination; the coefficient check refutes it
# with an explicit indicator pair.
bigger = WeightedGraph(
    graph.ids, graph.m, graph.c,
    [(graph.ids[u], graph.ids[v], 2.0 * b)
     for u, v, b in zip(graph.edge_u, graph.edge_v, graph.edge_b)],
)
rep2 = check_silverstein(FormPair(lower=dirichlet, upper=assemble(bigger)))
print(f"\ninflated-edge candidate: inequality ok = {rep2.inequality.ok}, "
      f"witness = {rep2.inequality.witness}")

# Maximality of the main part: every dominating candidate stays above it,
# and the unmasked form of the active subgraph attains it.
candidates = [neumann, dirichlet, assemble(induced_active_graph(graph, dirichlet.active))]
rng = np.random.default_rng(0)
probes = [rng.uniform(-1, 1, graph.n) for _ in range(4)]
report = verify_maximality(dirichlet, saturating_exhaustion(graph), candidates, probes)
print("\nmaximality probe (candidate >= main part everywhere):")
for v in report.verdicts:
    print(f"  candidate {v.index}: max shortfall {v.max_shortfall:.3e}, "
          f"equality={v.achieves_equality}")
