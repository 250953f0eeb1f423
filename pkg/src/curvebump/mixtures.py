"""Analytic Gaussian mixtures: exact derivatives, sampling, and smoothing.

These models double as ground truth for the Monte-Carlo experiments: their
value, gradient and Hessian are available in closed form, and convolving
with a Gaussian kernel of bandwidth h is again a Gaussian mixture with
covariances inflated by h^2 I.
"""

import math

import numpy as np

from .curvature import ordered_eigenvalues
from .errors import DataError
from .kde import DensityModel, SampleMatrix

WEIGHT_SUM_TOLERANCE = 1e-12


class GaussianMixtureModel(DensityModel):
    """Mixture of d-variate Gaussians (d <= 3) with full covariances."""

    def __init__(self, weights, means, covariances):
        weights = np.asarray(weights, dtype=float)
        means = np.atleast_2d(np.asarray(means, dtype=float))
        covariances = np.asarray(covariances, dtype=float)
        if covariances.ndim == 2:
            covariances = covariances[None, :, :]
        k = weights.shape[0]
        if means.shape[0] != k or covariances.shape[0] != k:
            raise DataError("weights, means and covariances must have matching lengths")
        d = means.shape[1]
        if d not in (1, 2, 3):
            raise DataError(f"mixture dimension must be 1, 2 or 3, got {d}")
        if covariances.shape[1:] != (d, d):
            raise DataError("covariance shapes do not match the mean dimension")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise DataError("weights must be nonnegative and sum to 1")
        for idx, cov in enumerate(covariances):
            if np.max(np.abs(cov - cov.T)) > 1e-9:
                raise DataError(f"covariance {idx} is not symmetric")
            if np.min(ordered_eigenvalues(cov)) <= 0:
                raise DataError(f"covariance {idx} is not positive definite")
        self.weights = weights
        self.means = means
        self.covariances = covariances
        try:
            self._chol = np.array([np.linalg.cholesky(c) for c in covariances])
            self._inv = np.array([np.linalg.inv(c) for c in covariances])
        except np.linalg.LinAlgError as exc:
            raise DataError(f"covariance is not invertible: {exc}") from exc
        dets = np.array([np.linalg.det(c) for c in covariances])
        self._norm = 1.0 / ((2.0 * math.pi) ** (d / 2.0) * np.sqrt(dets))

    @property
    def dim(self):
        return self.means.shape[1]

    def _component_terms(self, pts):
        """Per-component weighted density values and inv-whitened offsets."""
        for w, mu, inv, norm in zip(self.weights, self.means, self._inv, self._norm):
            delta = pts - mu
            mahal = np.einsum("mi,ij,mj->m", delta, inv, delta)
            yield w * norm * np.exp(-0.5 * mahal), delta @ inv

    def density(self, x):
        pts, single = self._prepare(x)
        val = np.zeros(pts.shape[0])
        for term, _ in self._component_terms(pts):
            val += term
        return float(val[0]) if single else val

    def gradient(self, x):
        pts, single = self._prepare(x)
        grad = np.zeros_like(pts)
        for term, offset in self._component_terms(pts):
            grad -= term[:, None] * offset
        return grad[0] if single else grad

    def hessian(self, x):
        pts, single = self._prepare(x)
        d = self.dim
        hess = np.zeros((pts.shape[0], d, d))
        for (term, offset), inv in zip(self._component_terms(pts), self._inv):
            hess += term[:, None, None] * (
                np.einsum("mi,mj->mij", offset, offset) - inv
            )
        hess = 0.5 * (hess + np.swapaxes(hess, 1, 2))
        return hess[0] if single else hess

    def sample(self, n, seed):
        """Draw n points: inverse-CDF component choice, Box-Muller normals.

        Deterministic for a given seed (an int or a sequence of ints).
        """
        if n < 1:
            raise DataError("sample size must be >= 1")
        rng = np.random.default_rng(seed)
        comp = np.searchsorted(np.cumsum(self.weights), rng.random(n), side="right")
        comp = np.minimum(comp, len(self.weights) - 1)
        d = self.dim
        pairs = (d + 1) // 2
        u1 = rng.random((n, pairs))
        u2 = rng.random((n, pairs))
        radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0, 1] avoids log(0)
        angle = 2.0 * math.pi * u2
        z = np.empty((n, 2 * pairs))
        z[:, 0::2] = radius * np.cos(angle)
        z[:, 1::2] = radius * np.sin(angle)
        points = self.means[comp] + np.einsum("nij,nj->ni", self._chol[comp], z[:, :d])
        return SampleMatrix(points)

    def smoothed(self, h):
        """The h-smoothed model: what a KDE with bandwidth h estimates on average."""
        if h <= 0:
            raise DataError("smoothing bandwidth must be positive")
        eye = np.eye(self.dim)
        return GaussianMixtureModel(
            self.weights, self.means, self.covariances + h * h * eye
        )


def density_derivatives(gmm, x):
    """(value, gradient, hessian) of the mixture at x, all exact."""
    return gmm.density(x), gmm.gradient(x), gmm.hessian(x)


def sample_mixture(gmm, n, seed):
    return gmm.sample(n, seed)


def smoothed_mixture(gmm, h):
    return gmm.smoothed(h)


def standard_normal_mixture(d):
    """Single standard Gaussian component in dimension d."""
    return GaussianMixtureModel([1.0], np.zeros((1, d)), np.eye(d)[None, :, :])


def boomerang_mixture():
    """Bimodal demo mixture whose mean-curvature bump forms one boomerang.

    Two equally-weighted components at (-1.5, 0) and (1.5, 0) with unit
    variances and correlations -0.7 and +0.7.  Its concave region splits
    into two modal lobes plus a central "mouth" that contains no mode,
    which makes it a good stress case for bump counting.
    """
    cov1 = np.array([[1.0, -0.7], [-0.7, 1.0]])
    cov2 = np.array([[1.0, 0.7], [0.7, 1.0]])
    return GaussianMixtureModel(
        [0.5, 0.5], [[-1.5, 0.0], [1.5, 0.0]], np.array([cov1, cov2])
    )


def mixture_window(gmm, pad=3.0):
    """Axis-aligned window covering every component mean plus pad standard deviations."""
    stds = np.sqrt(np.array([np.diag(c) for c in gmm.covariances]))
    lower = (gmm.means - pad * stds).min(axis=0)
    upper = (gmm.means + pad * stds).max(axis=0)
    return lower, upper
