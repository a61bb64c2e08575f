import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from rest_framework.test import APIClient

from casestudy.services.fixtures import REFERENCE, fixture_matrix
from core_stats.services.matrices import MvnModel
from mvn.services.distribution import mvn_sample
from utils.exceptions import InvalidInputError
from .services.limits import (
    ToleranceSpec,
    chi_square_quantile,
    simultaneous_upper_tolerance,
    tolerance_factor,
    univariate_upper_tolerances,
)
from .services.region import elliptical_tolerance_region, tolerance_region_factor


class UpperToleranceTests(SimpleTestCase):
    def test_fixture_univariate(self):
        np.testing.assert_allclose(univariate_upper_tolerances(fixture_matrix(), 0.9, 0.95),
                                   REFERENCE['univariate_tolerance'], atol=0.01)

    def test_fixture_bonferroni(self):
        np.testing.assert_allclose(simultaneous_upper_tolerance(fixture_matrix(), 0.9, 0.95),
                                   REFERENCE['bonferroni_tolerance'], atol=0.01)

    def test_factor_decreases_with_n(self):
        small = tolerance_factor(ToleranceSpec(beta=0.9, confidence=0.95, n=10))
        large = tolerance_factor(ToleranceSpec(beta=0.9, confidence=0.95, n=1000))
        self.assertGreater(small, large)
        self.assertGreater(large, 1.2816)

    def test_invalid_spec(self):
        with self.assertRaises(InvalidInputError):
            ToleranceSpec(beta=1.0, confidence=0.95, n=10)
        with self.assertRaises(InvalidInputError):
            ToleranceSpec(beta=0.9, confidence=0.95, n=1)


class ChiSquareTests(SimpleTestCase):
    def test_reference_values(self):
        self.assertAlmostEqual(chi_square_quantile(0.9, 2), 4.6052, places=4)
        self.assertAlmostEqual(chi_square_quantile(0.5, 1), 0.4549, places=4)

    def test_cap(self):
        with self.assertRaises(InvalidInputError):
            chi_square_quantile(0.999, 2, cap=5.0)
        with self.assertRaises(InvalidInputError):
            chi_square_quantile(0.9, 0)


class RegionFactorTests(SimpleTestCase):
    def test_large_n_approaches_chi_square(self):
        r = tolerance_region_factor(1_000_000, 2, 0.9, 0.95, n_mc=200, seed=1)
        self.assertAlmostEqual(r, chi_square_quantile(0.9, 2), delta=0.05)

    def test_small_n_is_wider(self):
        r10 = tolerance_region_factor(10, 2, 0.9, 0.95, n_mc=500, seed=2)
        r25 = tolerance_region_factor(25, 2, 0.9, 0.95, n_mc=500, seed=2)
        self.assertGreater(r10, r25)
        self.assertGreater(r25, chi_square_quantile(0.9, 2))

    def test_region_contains_center(self):
        data = mvn_sample(MvnModel.standard(2, 0.4), 30, seed=3)
        region = elliptical_tolerance_region(data, 0.9, 0.95, n_mc=300, seed=4)
        self.assertTrue(region.contains(region.center[None, :])[0])
        self.assertIsNotNone(region.boundary)
        self.assertEqual(region.as_dict()['beta'], 0.9)

    def test_n_must_exceed_q(self):
        with self.assertRaises(InvalidInputError):
            tolerance_region_factor(2, 2, 0.9, 0.95)


class ToleranceApiTests(SimpleTestCase):
    client_class = APIClient

    def test_upper(self):
        response = self.client.post('/api/tolerance/upper/', {
            'data': fixture_matrix().values.tolist(),
            'labels': ['X', 'Y', 'Z'],
        }, format='json')
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(body['code'], 200)
        np.testing.assert_allclose(body['data']['univariate'], REFERENCE['univariate_tolerance'], atol=0.01)

    def test_chi_square(self):
        response = self.client.post('/api/tolerance/chi-square/', {'prob': 0.9, 'dof': 2}, format='json')
        self.assertAlmostEqual(response.json()['data']['quantile'], 4.6052, places=4)

    def test_ragged_rows_rejected(self):
        response = self.client.post('/api/tolerance/upper/', {'data': [[1.0, 2.0], [3.0]]}, format='json')
        self.assertEqual(response.status_code, 400)


class ToleranceCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        self.data_path = self.root / 'srs.csv'
        pd.DataFrame(fixture_matrix().values, columns=['X', 'Y', 'Z']).to_csv(self.data_path, index=False)

    def _run(self, *args, **options):
        call_command('tolerance', str(self.data_path), *args, out_dir=str(self.root), threads=1,
                     stdout=StringIO(), **options)
        return json.loads((self.root / 'tolerance.json').read_text(encoding='utf-8'))

    def test_fixture(self):
        payload = self._run()
        self.assertEqual(payload['labels'], ['X', 'Y', 'Z'])
        np.testing.assert_allclose(payload['bonferroni'], REFERENCE['bonferroni_tolerance'], atol=0.01)
        self.assertNotIn('region', payload)

    def test_config_file_and_override(self):
        config_path = self.root / 'run.env'
        config_path.write_text('confidence=0.9\nbeta=0.8\n', encoding='utf-8')
        payload = self._run('--config', str(config_path), '--beta', '0.9')
        self.assertEqual(payload['confidence'], 0.9)
        self.assertEqual(payload['beta'], 0.9)
        manifest = json.loads((self.root / 'tolerance_manifest.json').read_text(encoding='utf-8'))
        self.assertEqual(manifest['config']['confidence'], 0.9)

    def test_region(self):
        payload = self._run('--region', n_mc=200, seed=2)
        self.assertGreater(payload['region']['r'], chi_square_quantile(0.9, 3))

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('tolerance', str(self.root / 'absent.csv'), out_dir=str(self.root), threads=1,
                         stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
