"""Operation counts and wall time of the solver as the graph grows.

Run: python3 demos/05_runtime_scaling.py
"""

import time

import numpy as np

from patterndiv.asrgraph import EdgeWeightedGraph
from patterndiv.coloring import ewvc_pd


def er_graph(rng, G, density):
    edges = {(a, b): float(rng.uniform(0.05, 1.0))
             for a in range(G) for b in range(a + 1, G) if rng.random() < density}
    return EdgeWeightedGraph(G, edges)


rng = np.random.default_rng(5)
P = 4
print("   G  density  bypassed      ops   ops/G^2  ops/(P G^2)   time[ms]")
for density in (0.02, 0.6):
    for G in (25, 50, 100, 200, 400):
        graph = er_graph(rng, G, density)
        t0 = time.perf_counter()
        _, trace = ewvc_pd(graph, P)
        ms = 1e3 * (time.perf_counter() - t0)
        print(f"{G:4d}  {density:7.2f}  {str(trace.phase2Bypassed):>8}  {trace.ops:7d}  "
              f"{trace.ops / G**2:8.3f}  {trace.ops / (P * G**2):11.3f}  {ms:9.2f}")
