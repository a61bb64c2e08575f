import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.test import SimpleTestCase
from rest_framework.test import APIClient

from casestudy.services.fixtures import FIXTURE_MAHALANOBIS_SQ, REFERENCE, fixture_matrix
from core_stats.services.matrices import MvnModel, mahalanobis_sq_all
from mvn.services.distribution import mvn_sample
from utils.exceptions import InsufficientSamplesError, InvalidInputError
from .services.envelope import plotting_positions, qq_envelope
from .services.goodness_of_fit import ad_test_chisq, anderson_darling_cdf, ks_test_chisq
from .services.report import normality_report


class GoodnessOfFitTests(SimpleTestCase):
    def setUp(self):
        self.distances = mahalanobis_sq_all(fixture_matrix())

    def test_fixture_ks(self):
        result = ks_test_chisq(self.distances, 3)
        self.assertAlmostEqual(result.p_value, REFERENCE['ks_p'], delta=0.02)

    def test_fixture_ad(self):
        result = ad_test_chisq(self.distances, 3)
        self.assertAlmostEqual(result.p_value, REFERENCE['ad_p'], delta=0.02)
        self.assertEqual(result.method, 'anderson-darling')

    def test_rounded_distances_agree(self):
        rounded = ks_test_chisq(FIXTURE_MAHALANOBIS_SQ, 3).p_value
        self.assertAlmostEqual(rounded, ks_test_chisq(self.distances, 3).p_value, delta=0.02)

    def test_shifted_distances_rejected(self):
        d = np.linspace(20.0, 40.0, 30)
        self.assertLess(ad_test_chisq(d, 2).p_value, 0.01)
        self.assertLess(ks_test_chisq(d, 2).p_value, 0.01)

    def test_ad_cdf_bounds(self):
        self.assertEqual(anderson_darling_cdf(10, 0.0), 0.0)
        self.assertGreater(anderson_darling_cdf(10, 10.0), 0.999)

    def test_too_few(self):
        with self.assertRaises(InsufficientSamplesError):
            ad_test_chisq([1.0, 2.0, 3.0], 2)
        with self.assertRaises(InvalidInputError):
            ks_test_chisq(self.distances, 0)


class EnvelopeTests(SimpleTestCase):
    def test_band_ordering(self):
        envelope = qq_envelope(50, 2, n_mc=2000, seed=1)
        self.assertEqual(envelope.n, 50)
        self.assertTrue(np.all(envelope.lower <= envelope.upper))
        self.assertTrue(np.all(np.diff(envelope.lower) >= 0))
        # 理论分位数大部分落在带内
        inside = (envelope.theoretical >= envelope.lower) & (envelope.theoretical <= envelope.upper)
        self.assertGreaterEqual(inside.mean(), 0.9)

    def test_normal_data_mostly_inside(self):
        data = mvn_sample(MvnModel.standard(2, 0.3), 50, seed=2)
        envelope = qq_envelope(50, 2, n_mc=2000, seed=3)
        self.assertGreaterEqual(envelope.inside(mahalanobis_sq_all(data)).mean(), 0.8)

    def test_length_mismatch(self):
        envelope = qq_envelope(20, 2, n_mc=200, seed=4)
        with self.assertRaises(InvalidInputError):
            envelope.inside(np.ones(10))

    def test_plotting_positions(self):
        np.testing.assert_allclose(plotting_positions(4), [0.125, 0.375, 0.625, 0.875])

    def test_reproducible(self):
        first = qq_envelope(15, 3, n_mc=300, seed=5)
        second = qq_envelope(15, 3, n_mc=300, seed=5)
        np.testing.assert_array_equal(first.upper, second.upper)


class ReportTests(SimpleTestCase):
    def test_fixture_report(self):
        report = normality_report(fixture_matrix(), n_mc=1000, seed=6)
        np.testing.assert_allclose(report.distances, FIXTURE_MAHALANOBIS_SQ, atol=0.03)
        self.assertAlmostEqual(report.ks_p, REFERENCE['ks_p'], delta=0.02)
        payload = report.as_dict()
        self.assertEqual(len(payload['envelope']['rows']), 9)
        self.assertEqual(payload['passed'], report.qq_pass and report.ad_p >= 0.05 and report.ks_p >= 0.05)


class NormalityApiTests(SimpleTestCase):
    client_class = APIClient

    def test_tests_endpoint(self):
        response = self.client.post('/api/normality/tests/', {
            'distances': list(FIXTURE_MAHALANOBIS_SQ),
            'dof': 3,
        }, format='json')
        self.assertEqual(response.status_code, 200)
        data = response.json()['data']
        self.assertAlmostEqual(data['kolmogorov_smirnov']['p_value'], REFERENCE['ks_p'], delta=0.02)

    def test_too_few_distances(self):
        response = self.client.post('/api/normality/tests/', {'distances': [1.0, 2.0], 'dof': 3}, format='json')
        self.assertEqual(response.json()['code'], 400)


class NormalityCommandTests(SimpleTestCase):
    def test_fixture_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'srs.csv'
            pd.DataFrame(fixture_matrix().values, columns=['X', 'Y', 'Z']).to_csv(path, index=False)
            call_command('normality', str(path), n_mc=500, seed=1, threads=1, out_dir=tmp, stdout=StringIO())
            qq = pd.read_csv(Path(tmp) / 'normality_qq.csv')
            self.assertEqual(list(qq.columns), ['rank', 'lower', 'theoretical', 'upper', 'observed'])
            self.assertEqual(len(qq), 9)
            payload = json.loads((Path(tmp) / 'normality.json').read_text(encoding='utf-8'))
            self.assertAlmostEqual(payload['ks_p'], REFERENCE['ks_p'], delta=0.02)
