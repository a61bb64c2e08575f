import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from core_stats.services.matrices import MvnModel, mahalanobis_sq_many
from mvn.services.correlation import CorrelationMatrix
from mvn.services.distribution import mvn_cdf_tensor, normal_quantile
from quantiles.services.critical import equicoordinate_quantile
from utils.exceptions import EmptySetError, InvalidInputError, ResourceError
from .services.contours import QuantileSet, elliptical_boundary, extract_quantile, vertex_residuals
from .services.critical import critical_point_by_selector, critical_point_from_set
from .services.export import export_quantile_set, stl_text
from .services.grid import (
    CdfGrid,
    GridQuantileRegion,
    GridSpec,
    check_grid_cells,
    domain_mass_bound,
    evaluate_cdf_grid,
    upsample_grid,
)


class GridSpecTests(SimpleTestCase):
    def test_default_steps(self):
        self.assertEqual(GridSpec(q=2).nodes_per_axis, 801)
        self.assertEqual(GridSpec(q=3).nodes_per_axis, 81)

    def test_step_must_divide_range(self):
        with self.assertRaises(InvalidInputError):
            GridSpec(q=2, step=0.3)

    def test_unsupported_dimension(self):
        with self.assertRaises(InvalidInputError):
            GridSpec(q=4)

    def test_domain_mass_bound(self):
        for q, expected in ((1, 0.999936), (2, 0.999873), (3, 0.999810)):
            self.assertAlmostEqual(domain_mass_bound(q), expected, delta=1e-6)

    def test_cell_cap(self):
        with self.assertRaises(ResourceError):
            check_grid_cells(10 ** 6, cap=1000)
        with self.assertRaises(ResourceError):
            evaluate_cdf_grid(MvnModel.standard(2), GridSpec(q=2, step=0.01), max_cells=1000)


class ContourTests(SimpleTestCase):
    def setUp(self):
        self.model = MvnModel.standard(2, 0.0)
        self.grid = evaluate_cdf_grid(self.model, GridSpec(q=2, step=0.05))

    def test_vertices_lie_on_level(self):
        qset = extract_quantile(self.grid, 0.5)
        self.assertEqual(qset.topology.shape[1], 2)
        self.assertLess(float(vertex_residuals(qset, self.model).max()), 2e-3)

    def test_asymptote_property(self):
        # F(x) ≤ Φ(x_i)，等值线上每个坐标都不小于 Φ⁻¹(τ)
        for tau in (0.3, 0.9):
            qset = extract_quantile(self.grid, tau)
            self.assertTrue(np.all(qset.vertices >= normal_quantile(tau) - 0.01))

    def test_diagonal_crossing(self):
        qset = extract_quantile(self.grid, 0.81)
        np.testing.assert_allclose(critical_point_from_set(qset), [1.2816, 1.2816], atol=5e-3)

    def test_level_outside_range(self):
        with self.assertRaises(EmptySetError):
            extract_quantile(self.grid, 0.99999)

    def test_saddle_cell(self):
        grid = CdfGrid((np.array([0.0, 1.0]), np.array([0.0, 1.0])), np.array([[0.0, 1.0], [1.0, 0.0]]))
        qset = extract_quantile(grid, 0.5)
        self.assertEqual(qset.topology.shape, (2, 2))
        self.assertEqual(qset.vertices.shape, (4, 2))

    def test_selectors_agree_for_standard_model(self):
        qset = extract_quantile(self.grid, 0.8)
        reference = critical_point_from_set(qset)
        for selector in ('max_pdf', 'min_translated_l2'):
            point = critical_point_by_selector(qset, selector, self.model)
            np.testing.assert_allclose(point, reference, atol=0.06)

    def test_selector_requires_model(self):
        qset = extract_quantile(self.grid, 0.8)
        with self.assertRaises(InvalidInputError):
            critical_point_by_selector(qset, 'max_pdf')

    def test_original_domain_mapping(self):
        qset = extract_quantile(self.grid, 0.5).to_original([10.0, 20.0], [2.0, 3.0])
        self.assertEqual(qset.domain_tag, 'original')
        with self.assertRaises(InvalidInputError):
            critical_point_from_set(qset)

    def test_planar_field(self):
        axes = (np.linspace(0.0, 1.0, 6), np.linspace(0.0, 1.0, 6))
        grid = CdfGrid(axes, np.repeat(axes[0][:, None], 6, axis=1))
        qset = extract_quantile(grid, 0.3)
        # F(x, y) = x 的等值线是竖直线 x = 0.3
        np.testing.assert_allclose(qset.vertices[:, 0], 0.3, atol=1e-12)
        self.assertAlmostEqual(float(qset.vertices[:, 1].min()), 0.0)
        self.assertAlmostEqual(float(qset.vertices[:, 1].max()), 1.0)
        self.assertEqual(qset.topology.shape, (5, 2))

    def test_residual_shrinks_with_step(self):
        model = MvnModel.standard(2, 0.5)
        coarse = extract_quantile(evaluate_cdf_grid(model, GridSpec(q=2, step=0.2)), 0.7)
        fine = extract_quantile(evaluate_cdf_grid(model, GridSpec(q=2, step=0.1)), 0.7)
        self.assertLessEqual(float(vertex_residuals(fine, model).max()),
                             float(vertex_residuals(coarse, model).max()) / 2)

    def test_fine_step_agrees_near_diagonal(self):
        corr = CorrelationMatrix.equicorrelated(2, 0.99).values
        model = MvnModel(np.zeros(2), corr)
        v = equicoordinate_quantile(0.9, corr)
        sets = []
        for nodes in (21, 201):
            # 只在对角交点附近 ±0.1 的窗口内加密，步长 0.01 与 0.001
            axis = np.linspace(v - 0.1, v + 0.1, nodes)
            sets.append(extract_quantile(CdfGrid((axis, axis), mvn_cdf_tensor((axis, axis), model)), 0.9))
        coarse, fine = sets
        gaps = np.linalg.norm(coarse.vertices[:, None, :] - fine.vertices[None, :, :], axis=-1).min(axis=1)
        self.assertLess(float(gaps.max()), 0.005)
        np.testing.assert_allclose(critical_point_from_set(coarse), critical_point_from_set(fine), atol=0.005)

    def test_grid_region_membership(self):
        region = GridQuantileRegion(self.grid, 0.5, np.zeros(2), np.ones(2))
        inside = region.contains(np.array([[0.0, 0.0], [3.0, 3.0]]))
        self.assertEqual(inside.tolist(), [True, False])


class IsoSurfaceTests(SimpleTestCase):
    def test_trivariate_diagonal_crossing(self):
        corr = CorrelationMatrix.equicorrelated(3, 0.5).values
        model = MvnModel(np.zeros(3), corr)
        grid = evaluate_cdf_grid(model, GridSpec(q=3, step=0.2))
        qset = extract_quantile(grid, 0.7)
        self.assertEqual(qset.topology.shape[1], 3)
        v = equicoordinate_quantile(0.7, corr)
        np.testing.assert_allclose(critical_point_from_set(qset), np.full(3, v), atol=0.02)
        self.assertLess(float(np.median(vertex_residuals(qset, model))), 5e-3)


class UpsampleTests(SimpleTestCase):
    def test_keeps_nodes_and_monotonicity(self):
        raw = evaluate_cdf_grid(MvnModel.standard(2, 0.6), GridSpec(q=2, step=0.25))
        grid = CdfGrid(raw.axes, np.maximum.accumulate(np.maximum.accumulate(raw.values, axis=0), axis=1))
        fine = upsample_grid(grid, 2)
        self.assertEqual(fine.values.shape, (65, 65))
        np.testing.assert_array_equal(fine.values[::2, ::2], grid.values)
        self.assertTrue(np.all(np.diff(fine.values, axis=0) >= 0))
        self.assertTrue(np.all(np.diff(fine.values, axis=1) >= 0))
        self.assertTrue(np.all((fine.values >= 0) & (fine.values <= 1)))

    def test_factor_one_is_identity(self):
        grid = evaluate_cdf_grid(MvnModel.standard(2), GridSpec(q=2, step=0.5))
        self.assertIs(upsample_grid(grid, 1), grid)


class EllipseAndExportTests(SimpleTestCase):
    def test_ellipse_on_distance_level(self):
        model = MvnModel([1.0, 2.0], [[2.0, 0.6], [0.6, 1.0]])
        boundary = elliptical_boundary(model, 4.61, n_points=90)
        distances = mahalanobis_sq_many(boundary.vertices, model.mean, model.cov)
        np.testing.assert_allclose(distances, 4.61, rtol=1e-10)
        self.assertEqual(boundary.topology[-1].tolist(), [89, 0])

    def test_export_files(self):
        qset = QuantileSet(
            tau=0.5,
            vertices=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
            topology=np.array([[0, 1, 2]]),
        )
        text = stl_text(qset, 'demo')
        self.assertIn('facet normal 0.000000e+00 0.000000e+00 1.000000e+00', text)
        with tempfile.TemporaryDirectory() as tmp:
            paths = export_quantile_set(qset, tmp, 'demo', labels=['X', 'Y', 'Z'])
            self.assertTrue(Path(paths['stl']).is_file())
            header = Path(paths['vertices']).read_text(encoding='utf-8').splitlines()[0]
            self.assertEqual(header, 'vertex,X,Y,Z')
