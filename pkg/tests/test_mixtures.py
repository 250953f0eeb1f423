import math

import numpy as np
import pytest

from curvebump import (
    DataError,
    GaussianMixtureModel,
    boomerang_mixture,
    density_derivatives,
    mixture_window,
    sample_mixture,
    smoothed_mixture,
    standard_normal_mixture,
)
from oracles import fd_gradient, fd_hessian


class TestDerivatives:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_standard_component_at_mode(self, d):
        gmm = standard_normal_mixture(d)
        x = np.zeros(d)
        value, gradient, hessian = density_derivatives(gmm, x)
        expected = (2 * math.pi) ** (-d / 2)
        assert value == pytest.approx(expected, rel=1e-14)
        np.testing.assert_array_equal(gradient, np.zeros(d))
        np.testing.assert_allclose(hessian, -expected * np.eye(d), atol=1e-15)

    def test_boomerang_mixture_at_origin(self):
        gmm = boomerang_mixture()
        x = np.zeros(2)
        value, gradient, hessian = density_derivatives(gmm, x)
        # frozen from the analytic closed form, cross-checked below by FD
        assert value == pytest.approx(0.024548926747124288, rel=1e-13)
        np.testing.assert_allclose(gradient, fd_gradient(gmm.density, x, 1e-6), atol=1e-8)
        np.testing.assert_allclose(hessian, fd_hessian(gmm.density, x, 1e-4), atol=1e-7)

    def test_random_mixture_matches_finite_differences(self):
        rng = np.random.default_rng(41)
        for d in (1, 2, 3):
            a = rng.normal(size=(2, d, d))
            covs = np.einsum("kij,kpj->kip", a, a) + 0.5 * np.eye(d)
            w = rng.uniform(0.2, 1.0, size=2)
            gmm = GaussianMixtureModel(w / w.sum(), rng.normal(size=(2, d)), covs)
            for _ in range(5):
                x = rng.normal(size=d)
                denom = max(1.0, abs(gmm.density(x)))
                assert np.abs(gmm.gradient(x) - fd_gradient(gmm.density, x, 1e-5)).max() / denom < 1e-6
                assert np.abs(gmm.hessian(x) - fd_hessian(gmm.density, x, 1e-4)).max() / denom < 1e-6

    def test_validation(self):
        with pytest.raises(DataError):
            GaussianMixtureModel([0.5, 0.4], np.zeros((2, 1)), np.ones((2, 1, 1)))
        with pytest.raises(DataError):
            GaussianMixtureModel([1.0], np.zeros((1, 2)), -np.eye(2)[None])
        with pytest.raises(DataError):
            GaussianMixtureModel([1.0], np.zeros((1, 2)), np.array([[[1.0, 0.2], [0.4, 1.0]]]))


class TestSampling:
    def test_large_sample_statistics(self):
        gmm = standard_normal_mixture(2)
        pts = gmm.sample(100_000, 12345).points
        np.testing.assert_allclose(pts.mean(axis=0), np.zeros(2), atol=0.02)
        np.testing.assert_allclose(np.cov(pts.T), np.eye(2), atol=0.02)

    def test_deterministic_given_seed(self):
        gmm = boomerang_mixture()
        a = gmm.sample(500, 7).points
        b = gmm.sample(500, 7).points
        np.testing.assert_array_equal(a, b)
        c = gmm.sample(500, 8).points
        assert not np.array_equal(a, c)

    def test_zero_weight_component_never_drawn(self):
        gmm = GaussianMixtureModel(
            [1.0, 0.0], [[0.0], [100.0]], np.array([np.eye(1), np.eye(1)])
        )
        pts = gmm.sample(2000, 3).points
        assert np.abs(pts).max() < 50.0

    def test_module_level_alias(self):
        gmm = standard_normal_mixture(1)
        np.testing.assert_array_equal(
            sample_mixture(gmm, 10, 1).points, gmm.sample(10, 1).points
        )


class TestSmoothing:
    def test_small_bandwidth_limit(self):
        gmm = boomerang_mixture()
        smoothed = smoothed_mixture(gmm, 1e-9)
        np.testing.assert_allclose(smoothed.covariances, gmm.covariances, atol=1e-12)

    def test_unit_bandwidth_doubles_identity(self):
        smoothed = smoothed_mixture(standard_normal_mixture(2), 1.0)
        np.testing.assert_allclose(smoothed.covariances[0], 2.0 * np.eye(2))

    def test_matches_monte_carlo_convolution(self):
        # smoothed value at x is E[K_h(x - X)]; check against a large MC average
        gmm = boomerang_mixture()
        h = 0.6
        x = np.array([0.4, -0.3])
        draws = gmm.sample(1_000_000, 99).points
        diff = (x - draws) / h
        kernel = np.exp(-0.5 * np.einsum("md,md->m", diff, diff)) / (2 * math.pi * h**2)
        mc_mean = kernel.mean()
        mc_se = kernel.std(ddof=1) / math.sqrt(len(kernel))
        value = smoothed_mixture(gmm, h).density(x)
        assert abs(value - mc_mean) <= 3.0 * mc_se

    def test_smoothing_lowers_peak_density(self):
        gmm = boomerang_mixture()
        lower, upper = mixture_window(gmm)
        axes = [np.linspace(lower[i], upper[i], 81) for i in range(2)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        assert smoothed_mixture(gmm, 0.5).density(pts).max() < gmm.density(pts).max()
