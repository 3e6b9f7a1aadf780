"""Outage probability against the number of clusters for two array sizes.

Run: python3 demos/04_outage_vs_clusters.py  (about ten seconds)
"""

from patterndiv.simharness import ExperimentConfig, run_experiment

config = ExperimentConfig(Gvalues=(4, 8, 12, 16, 20, 24), trials=200,
                          Mvalues=(32, 128), Pvalues=(2, 4)).with_(seed=3)
report = run_experiment(config)

print(" G  " + "  ".join(f"M={M:3d},P={P}" for M in (32, 128) for P in (2, 4)))
for G in config.Gvalues:
    cells = [report.row("ewvc_pd", G, P=P, M=M).outageProbability for M in (32, 128) for P in (2, 4)]
    print(f"{G:2d}  " + "  ".join(f"{x:11.3f}" for x in cells))
