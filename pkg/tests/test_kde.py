import math

import mpmath
import numpy as np
import pytest

from curvebump import (
    BandwidthSpec,
    DataError,
    DegenerateSampleError,
    KernelDensityModel,
    SampleMatrix,
    normal_scale_bandwidth,
)
from oracles import fd_gradient, fd_hessian, trapezoid_integral


def kde(points, h):
    return KernelDensityModel(np.asarray(points, dtype=float), h)


class TestValues:
    def test_single_kernel_center_1d(self):
        model = kde([[0.0]], 1.0)
        assert model.density(np.array([0.0])) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-14)

    def test_single_kernel_center_2d(self):
        model = kde([[0.0, 0.0]], 1.0)
        assert model.density(np.array([0.0, 0.0])) == pytest.approx(1.0 / (2 * math.pi), rel=1e-14)

    def test_two_kernels_at_midpoint(self):
        # by symmetry the average of the two kernel terms equals phi(1);
        # reference value from mpmath at 30 digits
        mpmath.mp.dps = 30
        expected = float(mpmath.exp(-mpmath.mpf(1) / 2) / mpmath.sqrt(2 * mpmath.pi))
        model = kde([[-1.0], [1.0]], 1.0)
        assert model.density(np.array([0.0])) == pytest.approx(expected, rel=1e-14)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(0)
        model = kde(rng.normal(size=(40, 2)), 0.7)
        pts = rng.normal(size=(25, 2))
        batch = model.density(pts)
        singles = np.array([model.density(p) for p in pts])
        np.testing.assert_array_equal(batch, singles)

    def test_dimension_mismatch_rejected(self):
        model = kde([[0.0, 0.0]], 1.0)
        with pytest.raises(DataError):
            model.density(np.array([1.0, 2.0, 3.0]))

    def test_non_finite_point_rejected(self):
        model = kde([[0.0]], 1.0)
        with pytest.raises(DataError):
            model.density(np.array([math.nan]))

    def test_sample_validation(self):
        with pytest.raises(DataError):
            SampleMatrix(np.zeros((0, 2)))
        with pytest.raises(DataError):
            SampleMatrix(np.zeros((3, 4)))
        with pytest.raises(DataError):
            SampleMatrix(np.array([[0.0], [math.inf]]))


class TestDerivatives:
    def test_gradient_zero_at_kernel_center(self):
        assert kde([[0.0]], 1.0).gradient(np.array([0.0]))[0] == 0.0
        np.testing.assert_array_equal(
            kde([[0.0, 0.0]], 1.0).gradient(np.array([0.0, 0.0])), np.zeros(2)
        )

    def test_gradient_matches_finite_differences(self):
        model = kde([[0.0]], 1.0)
        x = np.array([0.5])
        fd = fd_gradient(lambda p: model.density(p), x, step=1e-5)
        np.testing.assert_allclose(model.gradient(x), fd, rtol=1e-6)

    def test_hessian_at_bivariate_mode(self):
        model = kde([[0.0, 0.0]], 1.0)
        expected = -np.eye(2) / (2 * math.pi)
        np.testing.assert_allclose(model.hessian(np.array([0.0, 0.0])), expected, atol=1e-15)

    def test_hessian_at_univariate_mode(self):
        model = kde([[0.0]], 1.0)
        assert model.hessian(np.array([0.0]))[0, 0] == pytest.approx(-1.0 / math.sqrt(2 * math.pi), rel=1e-14)

    def test_hessian_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        model = kde(rng.normal(size=(50, 2)), 0.6)
        x = rng.normal(size=2)
        fd = fd_hessian(lambda p: model.density(p), x, step=1e-4)
        np.testing.assert_allclose(model.hessian(x), fd, rtol=1e-5, atol=1e-9)

    def test_hessian_symmetric(self):
        rng = np.random.default_rng(3)
        model = kde(rng.normal(size=(30, 3)), 0.8)
        hess = model.hessian(rng.normal(size=(10, 3)))
        np.testing.assert_array_equal(hess, np.swapaxes(hess, 1, 2))


class TestInvariants:
    def test_normalization_1d(self):
        rng = np.random.default_rng(11)
        pts = rng.normal(size=(200, 1))
        model = KernelDensityModel(pts)
        h = model.h
        lo, hi = pts.min() - 8 * h, pts.max() + 8 * h
        integral = trapezoid_integral(model.density, lo, hi, 10_000)
        assert integral == pytest.approx(1.0, abs=1e-4)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_derivative_consistency(self, d):
        rng = np.random.default_rng(100 + d)
        model = kde(rng.normal(size=(30, d)), 0.7)
        for _ in range(100):
            x = rng.normal(size=d) * 1.5
            value = model.density(x)
            denom = max(1.0, abs(value))
            fd_g = fd_gradient(model.density, x)
            fd_h = fd_hessian(model.density, x)
            assert np.abs(model.gradient(x) - fd_g).max() / denom < 1e-5
            assert np.abs(model.hessian(x) - fd_h).max() / denom < 1e-5

    def test_translation_equivariance(self):
        rng = np.random.default_rng(5)
        pts = rng.normal(size=(25, 2))
        shift = np.array([3.25, -1.5])
        x = rng.normal(size=(8, 2))
        a = kde(pts, 0.5)
        b = kde(pts + shift, 0.5)
        np.testing.assert_allclose(a.density(x), b.density(x + shift), atol=1e-12)
        np.testing.assert_allclose(a.gradient(x), b.gradient(x + shift), atol=1e-12)
        np.testing.assert_allclose(a.hessian(x), b.hessian(x + shift), atol=1e-12)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_scaling_covariance(self, d):
        c = 2.0
        rng = np.random.default_rng(40 + d)
        pts = rng.normal(size=(20, d))
        x = rng.normal(size=(6, d))
        a = kde(pts, 0.6)
        b = kde(c * pts, c * 0.6)
        np.testing.assert_allclose(b.density(c * x), a.density(x) * c**-d, atol=1e-10)
        np.testing.assert_allclose(b.gradient(c * x), a.gradient(x) * c ** -(d + 1), atol=1e-10)
        np.testing.assert_allclose(b.hessian(c * x), a.hessian(x) * c ** -(d + 2), atol=1e-10)


class TestBandwidth:
    def test_normal_scale_formula(self):
        # unit sigma-hat by construction; expected value evaluated independently
        mpmath.mp.dps = 30
        expected = float((mpmath.mpf(4) / 8000) ** (mpmath.mpf(1) / 10))
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(1000, 2))
        sigma = math.sqrt(pts.var(axis=0, ddof=1).mean())
        spec = normal_scale_bandwidth(pts / sigma, 2)
        assert spec.mode == "normal-scale" and spec.derivative_order == 2
        assert spec.h == pytest.approx(expected, rel=1e-12)

    def test_linear_in_sigma(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(500, 2))
        h1 = normal_scale_bandwidth(pts, 2).h
        h2 = normal_scale_bandwidth(2.0 * pts, 2).h
        assert h2 == pytest.approx(2.0 * h1, rel=1e-12)

    def test_sample_size_power_law(self):
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(400, 2))
        quadrupled = np.vstack([pts] * 4)
        h1 = normal_scale_bandwidth(pts, 2).h
        h4 = normal_scale_bandwidth(quadrupled, 2).h
        sigma1 = math.sqrt(pts.var(axis=0, ddof=1).mean())
        sigma4 = math.sqrt(quadrupled.var(axis=0, ddof=1).mean())
        assert h4 / h1 == pytest.approx((sigma4 / sigma1) * 4 ** -0.1, rel=1e-12)

    def test_degenerate_sample_rejected(self):
        with pytest.raises(DegenerateSampleError):
            normal_scale_bandwidth(np.ones((10, 2)), 2)
        with pytest.raises(DegenerateSampleError):
            normal_scale_bandwidth(np.array([[1.0]]), 2)

    def test_bandwidth_spec_validation(self):
        with pytest.raises(DataError):
            BandwidthSpec(h=-1.0)
        with pytest.raises(DataError):
            BandwidthSpec(h=1.0, mode="normal-scale", derivative_order=None)


def test_far_kernel_terms_are_exact_zeros():
    # terms beyond the squared-distance cutoff contribute an exact zero,
    # matching the documented underflow policy
    model = kde([[0.0], [50.0]], 1.0)
    lone = kde([[0.0]], 1.0)
    assert model.density(np.array([0.0])) == 0.5 * lone.density(np.array([0.0]))
    assert kde([[50.0]], 1.0).density(np.array([0.0])) == 0.0
