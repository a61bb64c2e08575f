import numpy as np
from django.test import SimpleTestCase

from core_stats.services.matrices import DataMatrix
from utils.exceptions import DegenerateResampleError, InvalidInputError
from .services.config import BootstrapConfig, PercentileRequest, normalize_ci_method, threads_to_jobs
from .services.intervals import (
    acceleration,
    adjusted_interval,
    bca_ci,
    bias_correction,
    confidence_interval,
    percentile_ci,
    tensor_percentile,
)
from .services.resampling import jackknife_samples, resample


class ConfigTests(SimpleTestCase):
    def test_gammas_sorted(self):
        self.assertEqual(PercentileRequest.of([0.975, 0.025]).gammas, (0.025, 0.975))
        self.assertEqual(PercentileRequest.two_sided(0.9).gammas, (0.05, 0.95))
        self.assertEqual(PercentileRequest.of([1 - 0.95]).gammas, (0.05,))

    def test_invalid_gamma(self):
        with self.assertRaises(InvalidInputError):
            PercentileRequest.of([0.0])

    def test_b_minimum(self):
        with self.assertRaises(InvalidInputError):
            BootstrapConfig(b=50)

    def test_alias_and_threads(self):
        self.assertEqual(normalize_ci_method('bc'), 'bias_corrected')
        self.assertEqual(threads_to_jobs(0), -1)
        self.assertEqual(threads_to_jobs(4), 4)

    def test_seed_drawn_when_missing(self):
        self.assertIsInstance(BootstrapConfig().seed, int)


class PercentileTests(SimpleTestCase):
    def test_type7_median(self):
        replicates = np.arange(1.0, 102.0)
        self.assertAlmostEqual(float(percentile_ci(replicates, PercentileRequest.of([0.5]))[0]), 51.0)

    def test_monotone_in_gamma(self):
        replicates = np.random.default_rng(0).normal(size=(500, 3))
        values = percentile_ci(replicates, PercentileRequest.of([0.05, 0.5, 0.95]))
        self.assertTrue(np.all(np.diff(values, axis=0) >= 0))

    def test_too_few_replicates(self):
        with self.assertRaises(InvalidInputError):
            percentile_ci(np.arange(10.0), PercentileRequest.of([0.5]))


class AdjustedIntervalTests(SimpleTestCase):
    def setUp(self):
        self.replicates = np.random.default_rng(1).gamma(2.0, size=1000)
        self.request = PercentileRequest.of([0.05, 0.95])

    def test_zero_adjustment_is_percentile(self):
        adjusted = adjusted_interval(self.replicates, self.request, 0.0, 0.0)
        np.testing.assert_allclose(adjusted.values, percentile_ci(self.replicates, self.request))
        self.assertFalse(adjusted.fallback)

    def test_constant_replicates_fall_back(self):
        result = bca_ci(np.full(200, 3.0), 3.0, np.full(10, 3.0), self.request)
        self.assertTrue(result.fallback)
        np.testing.assert_allclose(result.values, 3.0)

    def test_infinite_bias_falls_back_per_cell(self):
        replicates = np.column_stack([np.arange(200.0), np.random.default_rng(2).normal(size=200)])
        theta_hat = np.array([-1.0, 0.0])
        z0 = bias_correction(replicates, theta_hat)
        self.assertTrue(np.isneginf(z0[0]))
        result = adjusted_interval(replicates, self.request, z0, 0.0)
        self.assertEqual(result.fallback_cells, 1)
        np.testing.assert_allclose(result.values[:, 0], percentile_ci(replicates, self.request)[:, 0])

    def test_acceleration_symmetric_is_zero(self):
        self.assertAlmostEqual(float(acceleration(np.array([-2.0, -1.0, 0.0, 1.0, 2.0]))), 0.0)

    def test_bca_monotone(self):
        jack = np.random.default_rng(3).gamma(2.0, size=30)
        result = confidence_interval(self.replicates, PercentileRequest.of([0.025, 0.5, 0.975]), 'bca',
                                     theta_hat=float(np.median(self.replicates)), jackknife_values=jack)
        self.assertTrue(np.all(np.diff(result.values) >= 0))

    def test_method_requirements(self):
        with self.assertRaises(InvalidInputError):
            confidence_interval(self.replicates, self.request, 'bca', theta_hat=1.0)
        with self.assertRaises(InvalidInputError):
            confidence_interval(self.replicates, self.request, 'bc')

    def test_bca_covers_skewed_mean(self):
        # 指数分布均值：n=20，b=2000，500 次试验
        rng = np.random.default_rng(2024)
        request = PercentileRequest.two_sided(0.95)
        n, b, trials = 20, 2000, 500
        covered = 0
        for _ in range(trials):
            sample = rng.exponential(1.0, size=n)
            replicates = sample[rng.integers(0, n, size=(b, n))].mean(axis=1)
            jack = (sample.sum() - sample) / (n - 1)
            lo, hi = bca_ci(replicates, sample.mean(), jack, request).values
            covered += lo <= 1.0 <= hi
        self.assertGreaterEqual(covered / trials, 0.90)


class TensorPercentileTests(SimpleTestCase):
    def test_identical_grids(self):
        grid = np.linspace(0, 1, 12).reshape(3, 4)
        out = tensor_percentile([grid] * 150, PercentileRequest.of([0.05, 0.95]))
        for g in out:
            np.testing.assert_allclose(g, grid)

    def test_shape_mismatch(self):
        with self.assertRaises(InvalidInputError):
            tensor_percentile([np.zeros((2, 2)), np.zeros((3, 2))], PercentileRequest.of([0.5]))

    def test_monotone_grids_stay_monotone(self):
        rng = np.random.default_rng(5)
        grids = np.cumsum(np.cumsum(rng.random((200, 6, 6)), axis=1), axis=2)
        for g in tensor_percentile(grids, PercentileRequest.of([0.1, 0.9]), probabilities=False):
            self.assertTrue(np.all(np.diff(g, axis=0) >= -1e-9))
            self.assertTrue(np.all(np.diff(g, axis=1) >= -1e-9))


class ResamplingTests(SimpleTestCase):
    def setUp(self):
        self.data = DataMatrix(np.random.default_rng(6).normal(size=(15, 3)))

    def test_deterministic(self):
        config = BootstrapConfig(b=100, seed=12)
        np.testing.assert_array_equal(resample(self.data, config).values, resample(self.data, config).values)

    def test_nonparametric_rows_come_from_data(self):
        drawn = resample(self.data, BootstrapConfig(b=100, seed=1)).values
        rows = {tuple(r) for r in self.data.values}
        self.assertTrue(all(tuple(r) in rows for r in drawn))

    def test_parametric_shape(self):
        drawn = resample(self.data, BootstrapConfig(b=100, style='parametric', seed=1))
        self.assertEqual((drawn.n, drawn.q), (15, 3))

    def test_colinear_bivariate_allowed(self):
        data = DataMatrix(np.column_stack([np.arange(8.0), 2 * np.arange(8.0)]))
        self.assertEqual(resample(data, BootstrapConfig(b=100, seed=3)).n, 8)

    def test_singular_trivariate_gives_up(self):
        x = np.arange(6.0)
        data = DataMatrix(np.column_stack([x, x ** 2, x + x ** 2]))
        with self.assertRaises(DegenerateResampleError):
            resample(data, BootstrapConfig(b=100, seed=3))

    def test_jackknife(self):
        samples = list(jackknife_samples(self.data))
        self.assertEqual(len(samples), 15)
        np.testing.assert_array_equal(samples[0].values, self.data.values[1:])
