"""
Verifying the asymptotics at desk scale
=======================================

Two Monte-Carlo harnesses check the estimator against analytic mixture
ground truth: boundary consistency (the Hausdorff distance between the
estimated and true bump boundaries shrinks as n grows, with the coupled
bandwidth h = (log n / n)^(1/(d+2r+4))) and coverage validity (how often
the bootstrap sandwich captures the smoothed true bump).  Reports carry
their seeds, so every number here reruns bit for bit.
"""
import numpy as np

import curvebump as cb

# ---------------------------------------------------------------------------
# Consistency: a scaled-down version of the full experiment (the acceptance
# suite runs 20 replicates per sample size).

gmm = cb.boomerang_mixture()
n_list = [500, 2000]
report = cb.run_convergence_experiment(gmm, "laplacian", n_list, reps=4, seed=5)
print("convergence cells:")
for cell in report.cells:
    print(f"  n={cell['n']:5d}  h={cell['bandwidth']:.4f}  "
          f"Hausdorff {cell['mean_hausdorff']:.4f} +- {cell['sd_hausdorff']:.4f}  "
          f"({cell['count']} reps)")
means = [c["mean_hausdorff"] for c in report.cells]
print("log-log slope:", round(cb.loglog_slope(n_list, means), 3))

# ---------------------------------------------------------------------------
# Coverage: the sandwich should capture the smoothed bump at least 90% of
# the time at alpha=0.1; in practice the margins are conservative and the
# observed rate sits near 1.

cov = cb.run_coverage_experiment(
    cb.standard_normal_mixture(1), "laplacian",
    n=400, h=None, alpha=0.1, B=200, reps=50, seed=17,
)
cell = cov.cells[0]
print(f"coverage over {cell['count']} replicates: {cell['coverage']:.2f} "
      f"(mean zeta {cell['mean_zeta']:.4f})")

# ---------------------------------------------------------------------------
# The margin itself shrinks as n grows at fixed h, the second half of the
# validity statement.

for n in (200, 800, 3200):
    zetas = [
        cb.run_coverage_experiment(
            cb.standard_normal_mixture(1), "laplacian",
            n=n, h=0.5, alpha=0.1, B=200, reps=1, seed=100 + s,
        ).cells[0]["mean_zeta"]
        for s in range(5)
    ]
    print(f"n={n:5d}: mean zeta over 5 seeds = {np.mean(zetas):.4f}")

# ---------------------------------------------------------------------------
# Reports serialize to CSV (one row per cell) and JSON for downstream use.

print()
print(report.to_csv())
