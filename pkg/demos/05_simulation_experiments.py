"""Desk-scale runs of the shipped experiment protocols.

Each protocol reproduces one simulation study as a tidy table; here they
run at reduced repetition counts so the whole script finishes in about a
minute. Full-scale runs back the acceptance suite and the CLI:

    vtss experiment --preset fig2 --out results/fig2

Run with:  python demos/05_simulation_experiments.py
"""

import numpy as np

from vtss.experiments import ExperimentConfig, run_experiment

print("=== fig2: naive balancing is inconsistent under a biased generator ===")
table = run_experiment(ExperimentConfig("fig2", reps=20, base_seed=1,
                                        overrides={"n1_grid": [25, 100, 400, 1600]}))
cancel = table.metric_means("excess_risk/cancel")
naive = table.metric_means("excess_risk/naive")
print(f"{'n1':>6s} {'cancel rule':>12s} {'naive rule':>12s}")
for n1 in sorted(cancel):
    print(f"{int(n1):6d} {cancel[n1]:12.5f} {naive[n1]:12.5f}")
print("-> the 4x rule keeps shrinking, naive balancing flattens out\n")

print("=== fig3: VTSS vs naive balancing (consistent generator) ===")
table = run_experiment(ExperimentConfig("fig3", reps=20, base_seed=2,
                                        overrides={"n1_grid": [50, 200]}))
for n1 in (50.0, 200.0):
    pairs = table.paired_values("excess_risk/vtss", "excess_risk/naive", n1)
    wins = sum(a < b for a, b in pairs)
    print(f"n1 = {int(n1):3d}: VTSS wins {wins}/{len(pairs)}, "
          f"mean {np.mean([a for a, _ in pairs]):.5f} "
          f"vs naive {np.mean([b for _, b in pairs]):.5f}")
print()

print("=== fig4: local symmetry, one noise kind ===")
table = run_experiment(ExperimentConfig(
    "fig4", reps=15, base_seed=3, overrides={"noise_kinds": ["rademacher"]}))
print(f"{'generator':14s} {'gamma=0':>9s} {'gamma=4':>9s}")
for gen in ("oracle", "smote", "gaussian_fit", "semi_oracle"):
    m = table.metric_means(f"excess_risk/rademacher/{gen}")
    print(f"{gen:14s} {m[0.0]:9.5f} {m[4.0]:9.5f}")
print("-> only the oracle benefits from aggressive synthesis\n")

print("=== fig-select0: what multiplier does the tuner pick? ===")
table = run_experiment(ExperimentConfig(
    "fig-select0", reps=30, base_seed=4,
    overrides={"noise_kinds": ["uniform_cube"]}))
for gen in ("smote", "gaussian_fit"):
    vals = table.metric_values(f"gamma_star/uniform_cube/{gen}")
    frac = np.mean([v <= 0.1 for v in vals])
    print(f"{gen:14s} median gamma* = {np.median(vals):.3f}, "
          f"share <= 0.1: {frac:.0%}")
print("-> under local symmetry the tuner opts out of synthesis")
