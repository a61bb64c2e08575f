import numpy as np
from django.test import SimpleTestCase
from rest_framework.test import APIClient

from core_stats.services.matrices import MvnModel
from mvn.services.correlation import CorrelationMatrix
from mvn.services.distribution import CdfAccuracy, mvn_cdf
from utils.exceptions import InvalidInputError
from .services.coverage import (
    CriticalPointRegion,
    ModelQuantileRegion,
    draw_coverage_samples,
    estimate_coverage_beta,
)
from .services.critical import critical_point, equicoordinate_quantile
from .services.probability import (
    adjusted_individual_tau,
    bonferroni_bounds,
    joint_quantile_probability,
    multiple_comparison_sweep,
)


def _corr2(rho):
    return CorrelationMatrix.equicorrelated(2, rho).values


class JointProbabilityTests(SimpleTestCase):
    def test_bivariate_reference_values(self):
        self.assertAlmostEqual(joint_quantile_probability(0.90, _corr2(0.0)), 0.810, delta=1e-3)
        self.assertAlmostEqual(joint_quantile_probability(0.90, _corr2(-0.99)), 0.800, delta=1e-3)
        self.assertAlmostEqual(joint_quantile_probability(0.90, _corr2(0.99)), 0.8901, delta=1e-3)

    def test_sandwich(self):
        for q in (2, 3):
            for rho in (-0.4, 0.0, 0.5, 0.95):
                if q == 3 and rho < -0.45:
                    continue
                corr = CorrelationMatrix.equicorrelated(q, rho).values
                value = joint_quantile_probability(0.9, corr)
                bounds = bonferroni_bounds(0.9, q)
                self.assertGreaterEqual(value, bounds.lower - 1e-6)
                self.assertLessEqual(value, bounds.upper + 1e-6)

    def test_increases_with_correlation(self):
        values = [joint_quantile_probability(0.9, _corr2(rho)) for rho in np.linspace(-0.95, 0.95, 9)]
        self.assertTrue(np.all(np.diff(values) > 0))
        values = [joint_quantile_probability(0.8, CorrelationMatrix.equicorrelated(3, rho).values)
                  for rho in (-0.3, 0.0, 0.4, 0.8)]
        self.assertTrue(np.all(np.diff(values) > 0))

    def test_single_variate(self):
        self.assertAlmostEqual(joint_quantile_probability(0.9, [[1.0]]), 0.9, places=10)

    def test_invalid_tau(self):
        with self.assertRaises(InvalidInputError):
            joint_quantile_probability(1.2, _corr2(0.0))


class BoundsTests(SimpleTestCase):
    def test_bonferroni_lower_clamped(self):
        self.assertEqual(bonferroni_bounds(0.9, 20).lower, 0.0)
        self.assertAlmostEqual(bonferroni_bounds(0.9, 3).lower, 0.7)
        self.assertAlmostEqual(bonferroni_bounds(0.9, 3).independent_case, 0.729)

    def test_adjusted_tau(self):
        self.assertAlmostEqual(adjusted_individual_tau(0.9, 2, 'independent'), 0.9 ** 0.5)
        self.assertAlmostEqual(adjusted_individual_tau(0.9, 2, 'bonferroni'), 0.95)
        with self.assertRaises(InvalidInputError):
            adjusted_individual_tau(0.9, 2, 'sidak')

    def test_sweep(self):
        table = multiple_comparison_sweep(0.95, q_max=20)
        self.assertEqual(len(table), 20)
        self.assertTrue((table['bonferroni_lower'] <= table['independent'] + 1e-12).all())
        self.assertTrue((table['adjusted_bonferroni'] >= table['adjusted_independent'] - 1e-12).all())


class EquicoordinateTests(SimpleTestCase):
    def test_independent_inversion(self):
        self.assertAlmostEqual(equicoordinate_quantile(0.81, _corr2(0.0)), 1.2816, delta=1e-3)

    def test_round_trip(self):
        corr = np.array([[1.0, 0.3, 0.5], [0.3, 1.0, -0.2], [0.5, -0.2, 1.0]])
        v = equicoordinate_quantile(0.85, corr)
        self.assertAlmostEqual(mvn_cdf(np.full(3, v), MvnModel(np.zeros(3), corr)), 0.85, delta=1e-5)

    def test_perfect_correlation_reduces_to_univariate(self):
        self.assertAlmostEqual(equicoordinate_quantile(0.9, _corr2(1.0)), 1.28155, delta=1e-3)

    def test_critical_point_maps_to_original_domain(self):
        model = MvnModel([10.0, 20.0], [[4.0, 1.0], [1.0, 9.0]])
        result = critical_point(0.9, model)
        v = result.equicoordinate_value
        np.testing.assert_allclose(result.point, [10.0 + 2.0 * v, 20.0 + 3.0 * v])
        self.assertAlmostEqual(mvn_cdf(result.point, model), 0.9, delta=1e-5)


class CoverageTests(SimpleTestCase):
    def test_reference_coverage(self):
        model = MvnModel.standard(2, 0.9)
        estimate = estimate_coverage_beta(ModelQuantileRegion(model, 0.7), model, n_mc=100_000, seed=11)
        self.assertAlmostEqual(estimate.beta, 0.7841, delta=0.010)

    def test_coverage_at_least_tau(self):
        model = MvnModel.standard(2, 0.0)
        estimate = estimate_coverage_beta(ModelQuantileRegion(model, 0.5), model, n_mc=20_000, seed=2)
        self.assertGreater(estimate.beta, 0.5)

    def test_shared_samples_are_reused(self):
        model = MvnModel.standard(2, 0.5)
        samples = draw_coverage_samples(model, 10_000, seed=4)
        region = ModelQuantileRegion(model, 0.8)
        first = estimate_coverage_beta(region, model, samples=samples)
        second = estimate_coverage_beta(region, model, samples=samples)
        self.assertEqual(first.beta, second.beta)
        self.assertEqual(first.n_mc, 10_000)

    def test_critical_point_orthant(self):
        model = MvnModel.standard(2, 0.0)
        point = critical_point(0.81, model, CdfAccuracy()).point
        estimate = estimate_coverage_beta(CriticalPointRegion(point), model, n_mc=50_000, seed=8)
        self.assertAlmostEqual(estimate.beta, 0.81, delta=4 * estimate.std_error + 1e-3)

    def test_too_few_samples(self):
        with self.assertRaises(InvalidInputError):
            draw_coverage_samples(MvnModel.standard(2), 100)


class QuantilesApiTests(SimpleTestCase):
    client_class = APIClient

    def test_joint_probability(self):
        response = self.client.post('/api/quantiles/joint-probability/', {
            'tau': 0.9,
            'corr': [[1.0, 0.0], [0.0, 1.0]],
        }, format='json')
        self.assertAlmostEqual(response.json()['data']['tau_joint'], 0.81, delta=1e-4)

    def test_equicoordinate(self):
        response = self.client.post('/api/quantiles/equicoordinate/', {
            'tau': 0.9,
            'corr': [[1.0, 1.0], [1.0, 1.0]],
        }, format='json')
        self.assertAlmostEqual(response.json()['data']['value'], 1.2816, delta=1e-3)

    def test_sweep_rows(self):
        response = self.client.post('/api/quantiles/sweep/', {'tau': 0.9, 'q_max': 5}, format='json')
        self.assertEqual(len(response.json()['data']), 5)

    def test_bad_correlation(self):
        response = self.client.post('/api/quantiles/joint-probability/', {
            'tau': 0.9,
            'corr': [[1.0, 2.0], [2.0, 1.0]],
        }, format='json')
        self.assertEqual(response.status_code, 400)
