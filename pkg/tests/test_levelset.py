import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvebump import (
    ConfigurationError,
    DataError,
    GridSpec,
    ScalarFieldGrid,
    boomerang_mixture,
    connected_components,
    default_grid,
    eval_functional,
    evaluate_field,
    extract_zero_level,
    extract_zero_level_1d,
    extract_zero_level_2d,
    extract_zero_level_3d,
    hausdorff_distance,
    standard_normal_mixture,
)
from oracles import brute_force_hausdorff, flood_fill_count
from test_curvature import ConstantHessianModel


def synthetic_field(grid, fn):
    return ScalarFieldGrid(grid, fn(grid.nodes()), evaluate=fn)


class TestGridSpec:
    def test_nodes_row_major_coordinate_order(self):
        grid = GridSpec([0.0, 10.0], [1.0, 11.0], (2, 3))
        expected = np.array(
            [
                [0.0, 10.0], [0.0, 10.5], [0.0, 11.0],
                [1.0, 10.0], [1.0, 10.5], [1.0, 11.0],
            ]
        )
        np.testing.assert_array_equal(grid.nodes(), expected)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            GridSpec([0.0], [0.0], (5,))
        with pytest.raises(ConfigurationError):
            GridSpec([0.0], [1.0], (1,))
        with pytest.raises(ConfigurationError):
            GridSpec([0.0, 0.0], [1.0, 1.0], (20_000, 20_000))

    def test_default_grid_pads_three_bandwidths(self):
        from curvebump import SampleMatrix

        sample = SampleMatrix(np.array([[0.0], [2.0]]))
        grid = default_grid(sample, h=0.5, resolution=(11,))
        np.testing.assert_allclose(grid.lower, [-1.5])
        np.testing.assert_allclose(grid.upper, [3.5])

    def test_field_rejects_non_finite(self):
        grid = GridSpec([0.0], [1.0], (4,))
        with pytest.raises(DataError, match="node 2"):
            ScalarFieldGrid(grid, np.array([1.0, 1.0, math.nan, 1.0]))


class TestEvaluateField:
    def test_constant_functional_sign_folding(self):
        # lambda_1 is identically c; concave has sign selector 1
        grid = GridSpec([0.0, 0.0], [1.0, 1.0], (3, 3))
        model = ConstantHessianModel(np.diag([4.0, 1.0]))
        field = evaluate_field(model, "concave", grid)
        np.testing.assert_array_equal(field.values, -4.0 * np.ones((3, 3)))

    def test_origin_node_inside_concave_bump(self):
        grid = GridSpec([-1.0, -1.0], [1.0, 1.0], (3, 3))
        field = evaluate_field(standard_normal_mixture(2), "concave", grid)
        assert field.values[1, 1] == pytest.approx(1.0 / (2 * math.pi), rel=1e-12)

    def test_matches_direct_functional_calls(self):
        gmm = boomerang_mixture()
        grid = GridSpec([-4.0, -4.0], [4.0, 4.0], (161, 161))
        field = evaluate_field(gmm, "laplacian", grid)
        rng = np.random.default_rng(13)
        nodes = grid.nodes()
        idx = rng.integers(0, nodes.shape[0], size=100)
        direct = -eval_functional(gmm, "laplacian", nodes[idx])
        np.testing.assert_array_equal(field.values.ravel()[idx], direct)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            evaluate_field(standard_normal_mixture(2), "laplacian", GridSpec([0.0], [1.0], (5,)))

    def test_determinant_bump_requires_2d(self):
        with pytest.raises(ConfigurationError):
            evaluate_field(
                standard_normal_mixture(3),
                "hessian-determinant",
                GridSpec([-1.0] * 3, [1.0] * 3, (4, 4, 4)),
            )


class TestExtract1D:
    def test_gaussian_inflection_points(self):
        field = evaluate_field(
            standard_normal_mixture(1), "laplacian", GridSpec([-4.0], [4.0], (401,))
        )
        roots = extract_zero_level_1d(field).points.ravel()
        np.testing.assert_allclose(roots, [-1.0, 1.0], atol=1e-8)

    def test_strictly_positive_field_is_empty(self):
        grid = GridSpec([-1.0], [1.0], (21,))
        field = synthetic_field(grid, lambda p: p[:, 0] ** 2 + 1.0)
        assert extract_zero_level_1d(field).is_empty

    def test_cubic_roots(self):
        grid = GridSpec([-2.0], [2.0], (401,))
        field = synthetic_field(grid, lambda p: p[:, 0] ** 3 - p[:, 0])
        roots = extract_zero_level_1d(field).points.ravel()
        np.testing.assert_allclose(roots, [-1.0, 0.0, 1.0], atol=1e-8)

    def test_bisection_beats_linear_interpolation(self):
        # a strongly curved functional: linear interpolation would miss by
        # more than 1e-3 on this grid, bisection must not
        fn = lambda p: np.expm1(4.0 * p[:, 0]) - 1.0  # root at log(2)/4
        grid = GridSpec([0.0], [1.0], (11,))
        field = synthetic_field(grid, fn)
        roots = extract_zero_level_1d(field).points.ravel()
        assert len(roots) == 1
        assert roots[0] == pytest.approx(math.log(2.0) / 4.0, abs=1e-9)

    def test_node_zero_emitted_once(self):
        grid = GridSpec([-1.0], [1.0], (5,))
        field = synthetic_field(grid, lambda p: np.abs(p[:, 0]))  # zero only at node 0
        roots = extract_zero_level_1d(field).points.ravel()
        np.testing.assert_array_equal(roots, [0.0])

    def test_requires_continuous_functional_for_crossings(self):
        grid = GridSpec([-1.0], [1.0], (5,))
        field = ScalarFieldGrid(grid, np.array([-1.0, -0.5, 0.5, 1.0, 2.0]))
        with pytest.raises(ConfigurationError):
            extract_zero_level_1d(field)


class TestExtract2D:
    def test_unit_circle(self):
        grid = GridSpec([-2.0, -2.0], [2.0, 2.0], (201, 201))
        fn = lambda p: 1.0 - p[:, 0] ** 2 - p[:, 1] ** 2
        boundary = extract_zero_level_2d(synthetic_field(grid, fn))
        assert len(boundary.polylines) == 1
        line = boundary.polylines[0]
        assert np.array_equal(line[0], line[-1])  # closed loop marker
        radii = np.hypot(line[:, 0], line[:, 1])
        assert np.abs(radii - 1.0).max() < 0.02

    def test_constant_positive_empty(self):
        grid = GridSpec([-1.0, -1.0], [1.0, 1.0], (11, 11))
        assert extract_zero_level_2d(ScalarFieldGrid(grid, np.ones(121))).is_empty

    def test_linear_field_exact(self):
        grid = GridSpec([-1.0, -1.0], [1.0, 1.0], (21, 21))
        boundary = extract_zero_level_2d(synthetic_field(grid, lambda p: p[:, 0]))
        assert len(boundary.polylines) == 1
        assert np.abs(boundary.polylines[0][:, 0]).max() <= 1e-12

    @pytest.mark.parametrize(
        "center_sign,expected",
        [
            (1.0, {frozenset({(-1.0, 0.0), (0.0, 1.0)}), frozenset({(0.0, -1.0), (1.0, 0.0)})}),
            (-1.0, {frozenset({(-1.0, 0.0), (0.0, -1.0)}), frozenset({(1.0, 0.0), (0.0, 1.0)})}),
        ],
    )
    def test_saddle_resolved_by_center_sample(self, center_sign, expected):
        # single cell with corners (+,-,+,-): the center sample decides which
        # pairs of edge midpoints get connected
        grid = GridSpec([-1.0, -1.0], [1.0, 1.0], (2, 2))
        values = np.array([[1.0, -1.0], [-1.0, 1.0]])
        field = ScalarFieldGrid(grid, values, evaluate=lambda p: np.full(len(p), center_sign))
        boundary = extract_zero_level_2d(field)
        assert len(boundary.polylines) == 2
        pairs = {
            frozenset({tuple(line[0]), tuple(line[-1])}) for line in boundary.polylines
        }
        assert pairs == expected

    def test_vertex_residual_bounded_by_cell_oscillation(self):
        gmm = boomerang_mixture()
        grid = GridSpec([-4.0, -4.0], [4.0, 4.0], (101, 101))
        field = evaluate_field(gmm, "laplacian", grid)
        boundary = extract_zero_level_2d(field)
        vals = field.values
        cell_gap = np.abs(np.diff(vals, axis=0)).max() + np.abs(np.diff(vals, axis=1)).max()
        for line in boundary.polylines:
            residuals = np.abs(field.evaluate(line))
            assert residuals.max() <= 10.0 * cell_gap

    def test_refinement_does_not_worsen_hausdorff(self):
        fn = lambda p: 1.0 - p[:, 0] ** 2 - p[:, 1] ** 2
        angles = np.linspace(0.0, 2 * math.pi, 20_000)
        circle = np.column_stack([np.cos(angles), np.sin(angles)])
        dists = []
        for res in (101, 201):
            grid = GridSpec([-2.0, -2.0], [2.0, 2.0], (res, res))
            boundary = extract_zero_level_2d(synthetic_field(grid, fn))
            dists.append(hausdorff_distance(boundary.vertex_array(), circle))
        assert dists[1] <= 1.1 * dists[0]


class TestExtract3D:
    def test_unit_sphere(self):
        grid = GridSpec([-2.0] * 3, [2.0] * 3, (101,) * 3)
        fn = lambda p: 1.0 - np.einsum("md,md->m", p, p)
        mesh = extract_zero_level_3d(synthetic_field(grid, fn))
        radii = np.linalg.norm(mesh.vertices[np.unique(mesh.triangles)], axis=1)
        assert np.abs(radii - 1.0).max() < 0.04
        assert mesh.euler_characteristic() == 2

    def test_orientation_toward_increasing_field(self):
        grid = GridSpec([-2.0] * 3, [2.0] * 3, (41,) * 3)
        fn = lambda p: 1.0 - np.einsum("md,md->m", p, p)
        mesh = extract_zero_level_3d(synthetic_field(grid, fn))
        tri = mesh.vertices[mesh.triangles]
        normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        gradient = -2.0 * tri.mean(axis=1)  # field gradient at centroids
        dots = np.einsum("td,td->t", normals, gradient)
        # zero-area slivers (crossings exactly on grid nodes) carry no orientation
        solid = 0.5 * np.linalg.norm(normals, axis=1) > 1e-12
        assert solid.mean() > 0.9
        assert np.all(dots[solid] > 0)

    def test_constant_field_empty(self):
        grid = GridSpec([-1.0] * 3, [1.0] * 3, (5,) * 3)
        assert extract_zero_level_3d(ScalarFieldGrid(grid, np.ones(125))).is_empty

    def test_planar_field_exact(self):
        grid = GridSpec([-1.0] * 3, [1.0] * 3, (11,) * 3)
        mesh = extract_zero_level_3d(synthetic_field(grid, lambda p: p[:, 2]))
        assert np.abs(mesh.vertices[np.unique(mesh.triangles), 2]).max() <= 1e-12


class TestConnectedComponents:
    def test_all_negative(self):
        grid = GridSpec([0.0], [1.0], (8,))
        count, labels = connected_components(ScalarFieldGrid(grid, -np.ones(8)))
        assert count == 0 and not labels.any()

    def test_two_blobs(self):
        grid = GridSpec([0.0], [1.0], (7,))
        values = np.array([1.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0])
        count, labels = connected_components(ScalarFieldGrid(grid, values))
        assert count == 2

    def test_matches_flood_fill_oracle(self):
        rng = np.random.default_rng(53)
        grid = GridSpec([0.0, 0.0], [1.0, 1.0], (40, 40))
        values = rng.normal(size=(40, 40))
        count, _ = connected_components(ScalarFieldGrid(grid, values))
        assert count == flood_fill_count(values >= 0)


class TestHausdorff:
    def test_identical_sets(self):
        pts = np.random.default_rng(1).normal(size=(20, 2))
        assert hausdorff_distance(pts, pts) == 0.0

    def test_single_pair(self):
        assert hausdorff_distance([[0.0, 0.0]], [[3.0, 4.0]]) == pytest.approx(5.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(50, 2))
        b = rng.normal(size=(50, 2))
        assert hausdorff_distance(a, b) == pytest.approx(brute_force_hausdorff(a, b), abs=1e-12)

    def test_empty_set_rejected(self):
        with pytest.raises(DataError):
            hausdorff_distance(np.zeros((0, 2)), np.zeros((3, 2)))

    @given(
        st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=1, max_size=8),
        st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=1, max_size=8),
        st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=1, max_size=8),
    )
    @settings(max_examples=150, deadline=None)
    def test_symmetry_and_triangle_inequality(self, a, b, c):
        a, b, c = np.array(a), np.array(b), np.array(c)
        d_ab = hausdorff_distance(a, b)
        d_ba = hausdorff_distance(b, a)
        assert d_ab == pytest.approx(d_ba, abs=1e-12)
        assert d_ab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-12


def test_extract_dispatch():
    grid = GridSpec([-2.0], [2.0], (41,))
    field = synthetic_field(grid, lambda p: 1.0 - p[:, 0] ** 2)
    roots = extract_zero_level(field).points.ravel()
    np.testing.assert_allclose(roots, [-1.0, 1.0], atol=1e-9)
