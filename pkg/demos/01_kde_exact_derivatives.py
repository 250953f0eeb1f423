"""
Kernel density estimation with exact derivatives
=================================================

The estimator behind every bump is a plain Gaussian-kernel KDE whose
gradient and Hessian are computed analytically, term by term.  This demo
fits a small univariate sample, draws the density with its first two
derivatives, and checks the analytic curves against finite differences.
"""
import matplotlib.pyplot as plt
import numpy as np

import curvebump as cb

# ---------------------------------------------------------------------------
# Draw a bimodal sample and fit the KDE with the normal-scale bandwidth.
# The default rule targets second derivatives (r=2): curvature features
# need more smoothing than the density itself.

gmm = cb.GaussianMixtureModel(
    [0.6, 0.4], [[-1.2], [1.8]], np.array([[[0.6]], [[0.35]]])
)
sample = gmm.sample(2_000, seed=42)
model = cb.KernelDensityModel(sample)
print(f"n = {sample.n}, normal-scale bandwidth h = {model.h:.4f}")

# ---------------------------------------------------------------------------
# Evaluate the density, gradient and Hessian on a fine axis.

xs = np.linspace(-4.0, 4.5, 601)[:, None]
density = model.density(xs)
slope = model.gradient(xs)[:, 0]
curvature = model.hessian(xs)[:, 0, 0]

# ---------------------------------------------------------------------------
# Spot-check the analytic derivatives against central finite differences.

step = 1e-5
at = np.array([0.5])
fd_slope = (model.density(at + step) - model.density(at - step)) / (2 * step)
print(f"gradient at 0.5:  analytic {model.gradient(at)[0]:+.8f}  fd {fd_slope:+.8f}")

fd_curv = (
    model.density(at + step) + model.density(at - step) - 2 * model.density(at)
) / step**2
print(f"hessian  at 0.5:  analytic {model.hessian(at)[0, 0]:+.8f}  fd {fd_curv:+.8f}")

# ---------------------------------------------------------------------------
# The second derivative is what concave bumps look at: its negative part
# marks the locally concave stretches of the density graph.

fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
axes[0].plot(xs, density, color="navy")
axes[0].set_ylabel("density")
axes[1].plot(xs, slope, color="teal")
axes[1].axhline(0.0, color="gray", lw=0.8)
axes[1].set_ylabel("first derivative")
axes[2].plot(xs, curvature, color="firebrick")
axes[2].axhline(0.0, color="gray", lw=0.8)
axes[2].fill_between(
    xs[:, 0], curvature, 0.0, where=curvature < 0, color="firebrick", alpha=0.2
)
axes[2].set_ylabel("second derivative")
axes[2].set_xlabel("x")
fig.suptitle("Gaussian KDE and its exact derivatives")
fig.tight_layout()
fig.savefig("demo01_kde_derivatives.png", dpi=120)
print("wrote demo01_kde_derivatives.png")
