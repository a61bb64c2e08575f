import json
import tempfile
import unittest
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework.test import APIClient

from bootstrap.services.config import BootstrapConfig, PercentileRequest
from casestudy.services.fixtures import REFERENCE, fixture_matrix
from core_stats.services.matrices import DataMatrix, MvnModel, sample_corr, sample_mean
from meshes.services.grid import GridSpec
from mvn.services.distribution import mvn_cdf_many, mvn_sample
from quantiles.services.coverage import draw_coverage_samples, estimate_coverage_beta
from quantiles.services.critical import critical_point
from quantiles.services.probability import bonferroni_bounds, joint_quantile_probability
from utils.exceptions import InsufficientSamplesError, InvalidInputError
from .services.common import bootstrap_statistic
from .services.critical_point_ci import algorithm3_critical_point_ci
from .services.joint_tau import algorithm1_joint_tau_uq
from .services.quantile_ci import algorithm2_quantile_ci

slow = unittest.skipUnless(getattr(settings, 'QUANTILE_SLOW_TESTS', False), '设置 QUANTILE_SLOW_TESTS=True 以运行')


def _config(b=200, ci_method='percentile', seed=7, n_jobs=1):
    return BootstrapConfig(b=b, ci_method=ci_method, seed=seed, n_jobs=n_jobs)


class CommonTests(SimpleTestCase):
    def test_too_few_rows(self):
        data = DataMatrix(np.array([[0.0, 1.0], [4.0, 9.0], [16.0, 25.0]]))
        with self.assertRaises(InsufficientSamplesError):
            algorithm1_joint_tau_uq(data, 0.9, PercentileRequest.of([0.05]), _config())

    def test_tau_out_of_range(self):
        with self.assertRaises(InvalidInputError):
            algorithm3_critical_point_ci(fixture_matrix(), 1.0, PercentileRequest.of([0.95]), _config())

    def test_parallel_matches_serial(self):
        data = mvn_sample(MvnModel.standard(2, 0.3), 40, seed=1)
        serial = bootstrap_statistic(data, _config(), sample_mean)
        parallel = bootstrap_statistic(data, _config(n_jobs=2), sample_mean)
        np.testing.assert_allclose(serial, parallel)

    def test_seed_stability(self):
        data = mvn_sample(MvnModel.standard(2, 0.3), 40, seed=1)
        first = bootstrap_statistic(data, _config(b=5000, seed=11), sample_mean)
        again = bootstrap_statistic(data, _config(b=5000, seed=11), sample_mean)
        other = bootstrap_statistic(data, _config(b=5000, seed=12), sample_mean)
        np.testing.assert_array_equal(first, again)
        # 不同种子的 95% 百分位只差蒙特卡罗误差
        np.testing.assert_allclose(np.quantile(first, 0.95, axis=0), np.quantile(other, 0.95, axis=0), atol=0.03)


class JointTauTests(SimpleTestCase):
    def test_estimate_and_sandwich(self):
        data = fixture_matrix()
        result = algorithm1_joint_tau_uq(data, 0.9, PercentileRequest.of([0.05]), _config(b=500, ci_method='bca'))
        bounds = bonferroni_bounds(0.9, 3)
        self.assertAlmostEqual(result.estimate, joint_quantile_probability(0.9, sample_corr(data)), places=6)
        self.assertGreaterEqual(result.tau_values[0], bounds.lower - 1e-6)
        self.assertLessEqual(result.tau_values[0], bounds.upper + 1e-6)
        self.assertEqual(result.replicates.shape, (500,))
        self.assertTrue(np.all(result.replicates <= bounds.upper + 1e-6))

    def test_two_sided_ordering(self):
        data = mvn_sample(MvnModel.standard(3, 0.4), 60, seed=3)
        result = algorithm1_joint_tau_uq(data, 0.9, PercentileRequest.two_sided(0.95), _config())
        # γ = 0.025 对应 τ_J* 的上尾
        self.assertGreaterEqual(result.tau_values[0], result.tau_values[1])

    def test_gamma_maps_to_upper_percentile(self):
        data = mvn_sample(MvnModel.standard(3, 0.4), 60, seed=3)
        result = algorithm1_joint_tau_uq(data, 0.9, PercentileRequest.of([0.05]), _config())
        self.assertAlmostEqual(result.tau_values[0], float(np.quantile(result.replicates, 0.95)), places=10)
        self.assertGreaterEqual(result.tau_values[0], float(np.median(result.replicates)))

    def test_reproducible(self):
        data = mvn_sample(MvnModel.standard(2, -0.2), 30, seed=4)
        first = algorithm1_joint_tau_uq(data, 0.8, PercentileRequest.of([0.05]), _config())
        second = algorithm1_joint_tau_uq(data, 0.8, PercentileRequest.of([0.05]), _config())
        self.assertEqual(first.tau_values, second.tau_values)

    @slow
    def test_fixture_reference(self):
        result = algorithm1_joint_tau_uq(fixture_matrix(), 0.9, PercentileRequest.of([0.05]),
                                         _config(b=2000, ci_method='bca'))
        self.assertAlmostEqual(result.tau_values[0], REFERENCE['tau_joint'], delta=0.03)


class CriticalPointCiTests(SimpleTestCase):
    def test_fixture_exceeds_univariate_tolerance(self):
        result = algorithm3_critical_point_ci(fixture_matrix(), 0.9, PercentileRequest.of([0.95]),
                                              _config(b=500, ci_method='bca'))
        point = result.point(0.95)
        self.assertEqual(result.labels, ('X', 'Y', 'Z'))
        self.assertTrue(np.all(point > np.array(REFERENCE['univariate_tolerance'])))

    def test_estimate_is_plugin_critical_point(self):
        data = mvn_sample(MvnModel(np.array([1.0, 5.0]), np.array([[1.0, 0.5], [0.5, 4.0]])), 40, seed=5)
        result = algorithm3_critical_point_ci(data, 0.8, PercentileRequest.of([0.05, 0.95]), _config())
        model = MvnModel(sample_mean(data), np.cov(data.values, rowvar=False, ddof=1))
        np.testing.assert_allclose(result.estimate, critical_point(0.8, model).point, atol=1e-5)
        self.assertTrue(np.all(result.point(0.05) <= result.point(0.95)))

    def test_affine_equivariance(self):
        data = mvn_sample(MvnModel.standard(2, 0.6), 30, seed=6)
        shifted = DataMatrix(data.values * np.array([2.0, 0.5]) + np.array([5.0, -3.0]))
        request = PercentileRequest.of([0.95])
        base = algorithm3_critical_point_ci(data, 0.9, request, _config())
        moved = algorithm3_critical_point_ci(shifted, 0.9, request, _config())
        np.testing.assert_allclose(moved.point(0.95), base.point(0.95) * np.array([2.0, 0.5]) + np.array([5.0, -3.0]),
                                   atol=1e-6)

    @slow
    def test_fixture_reference(self):
        result = algorithm3_critical_point_ci(fixture_matrix(), 0.9, PercentileRequest.of([0.95]),
                                              _config(b=2000, ci_method='bca'))
        expected = np.array(REFERENCE['critical_point_ci'])
        np.testing.assert_allclose(result.point(0.95), expected, rtol=0.03)


class QuantileCiTests(SimpleTestCase):
    def setUp(self):
        self.data = mvn_sample(MvnModel.standard(2, 0.5), 40, seed=8)
        self.grid = GridSpec(q=2, step=0.1)

    def test_upper_set_covers_more(self):
        result = algorithm2_quantile_ci(self.data, 0.8, PercentileRequest.of([0.05, 0.95]), _config(b=100),
                                        grid=self.grid, interpolate=False)
        self.assertTrue(np.all(result.grids[0.95].values <= result.grids[0.05].values + 1e-12))
        model = MvnModel.standard(2, 0.5)
        samples = draw_coverage_samples(model, 20_000, seed=9)
        low = estimate_coverage_beta(result.region(0.05), model, samples=samples).beta
        high = estimate_coverage_beta(result.region(0.95), model, samples=samples).beta
        self.assertGreaterEqual(high, low)
        self.assertEqual(result.critical_points[0.95].shape, (2,))

    def test_sets_in_original_domain(self):
        shifted = DataMatrix(self.data.values * 3.0 + 10.0)
        result = algorithm2_quantile_ci(shifted, 0.8, PercentileRequest.of([0.95]), _config(b=100, ci_method='bca'),
                                        grid=self.grid)
        vertices = result.quantile_set(0.95).vertices
        self.assertGreater(vertices.shape[0], 10)
        # 等值线顶点应在原始数据的量级上
        self.assertGreater(float(np.median(vertices)), 5.0)
        self.assertTrue(result.as_dict()['sets']['0.95']['residuals']['max'] < 0.02)

    def test_collinear_resamples(self):
        # n = q + 2 时不少重抽样只含两个不同的行，协方差秩为 1
        data = DataMatrix(np.array([[0.1, 1.3], [1.2, 0.4], [2.3, 2.9], [3.1, 1.7]]))
        result = algorithm2_quantile_ci(data, 0.8, PercentileRequest.of([0.95]), _config(b=100, seed=1),
                                        grid=GridSpec(q=2, step=0.1))
        self.assertGreater(result.quantile_set(0.95).vertices.shape[0], 0)
        self.assertTrue(np.all(np.isfinite(result.grids[0.95].values)))

    def test_large_sample_recovers_contour(self):
        model = MvnModel.standard(2, 0.5)
        data = mvn_sample(model, 3000, seed=21)
        result = algorithm2_quantile_ci(data, 0.8, PercentileRequest.of([0.5, 0.95]), _config(b=100, seed=2),
                                        grid=self.grid)
        residuals = np.abs(mvn_cdf_many(result.quantile_set(0.5).vertices, model) - 0.8)
        self.assertLess(float(residuals.mean()), 0.015)
        self.assertLess(float(residuals.max()), 0.04)

        # 对角交点与临界点置信区间相差不超过两个网格步长
        critical = algorithm3_critical_point_ci(data, 0.8, PercentileRequest.of([0.95]), _config(b=100, seed=2))
        scaling = np.std(data.values, axis=0, ddof=1)
        gap = np.abs(result.critical_points[0.95] - critical.point(0.95)) / scaling
        self.assertTrue(np.all(gap <= 2 * self.grid.step))

    def test_dimension_mismatch(self):
        with self.assertRaises(InvalidInputError):
            algorithm2_quantile_ci(self.data, 0.8, PercentileRequest.of([0.95]), _config(b=100), grid=GridSpec(q=3))


class AlgorithmCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def _write(self, data: DataMatrix, name: str = 'data.csv') -> str:
        path = self.root / name
        pd.DataFrame(data.values, columns=list(data.column_labels())).to_csv(path, index=False)
        return str(path)

    def _call(self, name, *args, **options):
        call_command(name, *args, b=100, seed=1, threads=1, out_dir=str(self.root), stdout=StringIO(), **options)
        return json.loads((self.root / f'{name}.json').read_text(encoding='utf-8'))

    def test_joint_tau(self):
        payload = self._call('joint_tau', self._write(fixture_matrix()), '--gamma', '0.05', '--gamma', '0.5')
        self.assertEqual(payload['gammas'], [0.05, 0.5])
        self.assertGreaterEqual(payload['tau_values'][0], payload['tau_values'][1])
        manifest = json.loads((self.root / 'joint_tau_manifest.json').read_text(encoding='utf-8'))
        self.assertEqual(manifest['seed'], 1)

    def test_critical_point(self):
        payload = self._call('critical_point', self._write(fixture_matrix()), tau=0.9)
        self.assertEqual(payload['labels'], ['X', 'Y', 'Z'])
        self.assertEqual(len(payload['points']['0.95']), 3)

    def test_quantile_ci_exports(self):
        data = mvn_sample(MvnModel.standard(2, 0.3), 30, seed=2)
        payload = self._call('quantile_ci', self._write(data), '--no-interpolate', grid_step=0.2, tau=0.8)
        self.assertFalse(payload['interpolate'])
        self.assertTrue((self.root / 'quantile_ci_g0.95_vertices.csv').is_file())
        self.assertTrue((self.root / 'quantile_ci_g0.95_topology.csv').is_file())

    def test_quantile_ci_cell_cap(self):
        data = mvn_sample(MvnModel.standard(2, 0.3), 30, seed=2)
        with self.assertRaises(CommandError) as ctx:
            self._call('quantile_ci', self._write(data), grid_step=0.01, max_cells=1000)
        self.assertEqual(ctx.exception.returncode, 3)


class AlgorithmApiTests(SimpleTestCase):
    client_class = APIClient

    def test_critical_point(self):
        response = self.client.post('/api/algorithms/critical-point/', {
            'data': fixture_matrix().values.tolist(),
            'tau': 0.9,
            'gammas': [0.95],
            'b': 200,
            'seed': 3,
        }, format='json')
        self.assertEqual(response.status_code, 200)
        points = response.json()['data']['points']['0.95']
        self.assertTrue(np.all(np.array(points) > np.array(REFERENCE['univariate_tolerance']) - 1.0))

    def test_b_limit(self):
        response = self.client.post('/api/algorithms/joint-tau/', {
            'data': fixture_matrix().values.tolist(),
            'b': 10 ** 7,
        }, format='json')
        self.assertEqual(response.status_code, 400)
