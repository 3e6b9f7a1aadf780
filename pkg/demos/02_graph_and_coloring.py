"""From cluster overlap to a pattern assignment.

Run: python3 demos/02_graph_and_coloring.py
"""

# %% [markdown]
# Drop a handful of clusters, build the overlap graph, then let the
# two-phase solver assign patterns.  Edges carry ``2|Ja & Jb| / (ra + rb)``.

# %%
import numpy as np

from patterndiv import asrgraph, channel, coloring, precoding

rng = np.random.default_rng(7)
M, G, P = 32, 12, 2
geoms = channel.place_clusters(G, 600.0, 30.0, 30.0, rng)
supports = channel.support_sets(geoms, M, 0.5)
graph = asrgraph.build_graph(supports)
print(asrgraph.format_edgelist(graph, P))

# %%
assignment, trace = coloring.ewvc_pd(graph, P)
print("seed pair:", trace.initPair)
print("phase I colored", trace.phase1Colored, "| phase II colored", trace.phase2Colored,
      "| bypassed:", trace.phase2Bypassed)
for p, members in enumerate(assignment.patternSets):
    print(f"pattern {p}: clusters {list(members)}")
print("co-pattern overlap f =", coloring.objective_f(graph, assignment))

# %% [markdown]
# Each cluster keeps the DFT columns no co-pattern neighbor uses.  A cluster
# is served only if it keeps at least one column per user.

# %%
Kg = 2
for g in range(G):
    pre = precoding.prebeamformer(supports, assignment, g)
    flag = "ok" if precoding.feasibility(pre, Kg) else "OUTAGE"
    print(f"cluster {g}: rank {supports[g].rank:2d} -> Ng {pre.Ng:2d}  {flag}")
