import math

import numpy as np
from django.test import SimpleTestCase
from rest_framework.test import APIClient
from scipy import stats
from scipy.special import ndtr

from core_stats.services.matrices import MvnModel, sample_corr
from utils.exceptions import InvalidInputError
from .services.bivariate import bvn_cdf
from .services.correlation import CorrelationMatrix, cvine_random_correlation
from .services.distribution import (
    CdfAccuracy,
    mvn_cdf,
    mvn_cdf_many,
    mvn_cdf_tensor,
    mvn_pdf,
    mvn_sample,
    normal_quantile,
    standard_mvn_cdf,
)


class BivariateTests(SimpleTestCase):
    def test_orthant_probability(self):
        for rho in (-0.9, -0.3, 0.0, 0.5, 0.95):
            expected = 0.25 + math.asin(rho) / (2 * math.pi)
            self.assertAlmostEqual(float(bvn_cdf(0.0, 0.0, rho)), expected, places=7)

    def test_perfect_correlation(self):
        self.assertAlmostEqual(float(bvn_cdf(0.3, 1.1, 1.0)), stats.norm.cdf(0.3), places=7)
        self.assertAlmostEqual(float(bvn_cdf(0.5, 0.5, -1.0)), 2 * stats.norm.cdf(0.5) - 1, places=7)

    def test_matches_scipy(self):
        rho = 0.7
        reference = stats.multivariate_normal([0, 0], [[1, rho], [rho, 1]]).cdf([0.4, -0.8])
        self.assertAlmostEqual(float(bvn_cdf(0.4, -0.8, rho)), reference, places=5)


class CdfTests(SimpleTestCase):
    def test_normal_quantile(self):
        self.assertAlmostEqual(normal_quantile(0.9), 1.2815516, places=6)
        with self.assertRaises(InvalidInputError):
            normal_quantile(1.0)

    def test_trivariate_orthant(self):
        rho = 0.5
        expected = 0.125 + 3 * math.asin(rho) / (4 * math.pi)
        self.assertAlmostEqual(standard_mvn_cdf(np.zeros(3), CorrelationMatrix.equicorrelated(3, rho).values),
                               expected, places=5)

    def test_independence_factorization(self):
        acc = CdfAccuracy(abs_tol=1e-5)
        h = np.array([0.3, -0.2, 1.1, 0.7])
        self.assertAlmostEqual(standard_mvn_cdf(h, np.eye(4), acc), float(np.prod(stats.norm.cdf(h))),
                               delta=2e-5)

    def test_four_variate_against_scipy(self):
        corr = CorrelationMatrix.equicorrelated(4, 0.4).values
        h = np.array([0.5, 1.0, -0.3, 0.8])
        acc = CdfAccuracy(abs_tol=1e-4)
        reference = stats.multivariate_normal(np.zeros(4), corr).cdf(h)
        self.assertAlmostEqual(standard_mvn_cdf(h, corr, acc), reference, delta=1e-3)

    def test_monotone_in_each_argument(self):
        model = MvnModel([1.0, 2.0, 0.0], CorrelationMatrix.equicorrelated(3, 0.6).values * 4.0)
        base = mvn_cdf([1.5, 2.5, 0.5], model)
        for j in range(3):
            x = np.array([1.5, 2.5, 0.5])
            x[j] += 0.5
            self.assertGreaterEqual(mvn_cdf(x, model), base - 1e-9)

    def test_location_scale(self):
        model = MvnModel([10.0, -5.0], [[4.0, 1.2], [1.2, 1.0]])
        standard = standard_mvn_cdf([0.5, 0.25], model.correlation())
        self.assertAlmostEqual(mvn_cdf([11.0, -4.75], model), standard, places=10)

    def test_infinite_limit(self):
        model = MvnModel.standard(2, 0.3)
        self.assertAlmostEqual(mvn_cdf([np.inf, 0.7], model), stats.norm.cdf(0.7), places=7)

    def test_tensor_matches_pointwise(self):
        model = MvnModel([0.0, 0.0, 0.0], [[1.0, 0.5, 0.2], [0.5, 1.0, -0.3], [0.2, -0.3, 1.0]])
        axes = [np.linspace(-2, 2, 5), np.linspace(-1, 2, 4), np.linspace(-2, 1, 3)]
        tensor = mvn_cdf_tensor(axes, model)
        grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, 3)
        pointwise = mvn_cdf_many(grid, model, CdfAccuracy(abs_tol=1e-7)).reshape(tensor.shape)
        np.testing.assert_allclose(tensor, pointwise, atol=1e-5)

    def test_tensor_perfect_correlation(self):
        axes = (np.linspace(-3.0, 3.0, 13), np.linspace(-2.0, 4.0, 13))
        model = MvnModel(np.zeros(2), np.array([[1.0, 2.0], [2.0, 4.0]]))
        # ρ = 1：P(X ≤ x, 2X ≤ y) = Φ(min(x, y / 2))
        expected = ndtr(np.minimum(axes[0][:, None], axes[1][None, :] / 2.0))
        np.testing.assert_allclose(mvn_cdf_tensor(axes, model), expected, atol=1e-10)

    def test_tensor_rejects_high_dimension(self):
        with self.assertRaises(InvalidInputError):
            mvn_cdf_tensor([np.zeros(2)] * 4, MvnModel.standard(4))

    def test_pdf_peak(self):
        self.assertAlmostEqual(mvn_pdf([0.0, 0.0], MvnModel.standard(2)), 1 / (2 * math.pi), places=12)


class SamplingTests(SimpleTestCase):
    def test_deterministic(self):
        model = MvnModel.standard(3, 0.4)
        np.testing.assert_array_equal(mvn_sample(model, 20, seed=5).values, mvn_sample(model, 20, seed=5).values)

    def test_moments(self):
        model = MvnModel([1.0, -1.0], [[2.0, 0.9], [0.9, 1.0]])
        data = mvn_sample(model, 20000, seed=1)
        np.testing.assert_allclose(data.values.mean(axis=0), [1.0, -1.0], atol=0.05)
        np.testing.assert_allclose(sample_corr(data)[0, 1], 0.9 / math.sqrt(2.0), atol=0.02)


class CorrelationTests(SimpleTestCase):
    def test_cvine_is_valid_correlation(self):
        for q in (2, 3, 4, 6):
            corr = cvine_random_correlation(q, 2.0, seed=q).values
            np.testing.assert_allclose(np.diag(corr), 1.0)
            self.assertGreater(np.linalg.eigvalsh(corr)[0], 0.0)

    def test_cvine_seeded(self):
        np.testing.assert_array_equal(cvine_random_correlation(4, 2.0, seed=9).values,
                                      cvine_random_correlation(4, 2.0, seed=9).values)

    def test_rejects_bad_diagonal(self):
        with self.assertRaises(InvalidInputError):
            CorrelationMatrix([[2.0, 0.0], [0.0, 1.0]])


class MvnApiTests(SimpleTestCase):
    client_class = APIClient

    def test_cdf(self):
        response = self.client.post('/api/mvn/cdf/', {
            'mean': [0.0, 0.0],
            'cov': [[1.0, 0.0], [0.0, 1.0]],
            'x': [1.2816, 1.2816],
        }, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertAlmostEqual(response.json()['data']['cdf'], 0.81, delta=1e-4)

    def test_dimension_mismatch(self):
        response = self.client.post('/api/mvn/pdf/', {
            'mean': [0.0, 0.0],
            'cov': [[1.0, 0.0], [0.0, 1.0]],
            'x': [0.0],
        }, format='json')
        self.assertEqual(response.status_code, 400)

    def test_quantile_out_of_range(self):
        response = self.client.post('/api/mvn/quantile/', {'tau': 1.5}, format='json')
        self.assertEqual(response.json()['code'], 400)
