import json
import tempfile
import unittest
from io import StringIO
from pathlib import Path

import pandas as pd
from django.conf import settings
from django.core.management import call_command
from django.test import SimpleTestCase

from utils.exceptions import InvalidInputError
from .services.config import StudyConfig
from .services.reports import write_study_outputs
from .services.studies import run_study, run_study_alg1, run_study_alg2, run_study_alg3, wilson_band

slow = unittest.skipUnless(getattr(settings, 'QUANTILE_SLOW_TESTS', False), '设置 QUANTILE_SLOW_TESTS=True 以运行')

BAND_COLUMNS = ['p', 'trials', 'band_low', 'band_high', 'in_band']


class StudyConfigTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(InvalidInputError):
            StudyConfig(study='alg4')
        with self.assertRaises(InvalidInputError):
            StudyConfig(study='alg1', mc_trials=5)
        with self.assertRaises(InvalidInputError):
            StudyConfig(study='alg1', n_list=())
        with self.assertRaises(InvalidInputError):
            StudyConfig.from_preset('alg1', 'huge')

    def test_alg2_is_bivariate(self):
        self.assertEqual(StudyConfig(study='alg2', q_list=(3,)).q_list, (2,))

    def test_preset_overrides(self):
        config = StudyConfig.from_preset('alg3', 'desk', b=200, seed=4)
        self.assertEqual(config.bootstrap.b, 200)
        self.assertEqual(config.q_list, (2, 3))
        self.assertEqual(config.gammas, (0.95,))
        self.assertEqual(StudyConfig.from_preset('alg3', 'desk', seed=4).bootstrap.b, 500)

    def test_trial_bootstrap(self):
        config = StudyConfig.from_preset('alg1', 'smoke', seed=1, n_jobs=4)
        trial = config.trial_bootstrap(99)
        self.assertEqual((trial.seed, trial.n_jobs, trial.b), (99, 1, 100))
        self.assertEqual(config.as_dict()['bootstrap']['ci_method'], 'bca')


class WilsonBandTests(SimpleTestCase):
    def test_nominal_band(self):
        low, high = wilson_band(0.95, 100)
        self.assertAlmostEqual(low, 0.8608, delta=1e-3)
        self.assertAlmostEqual(high, 0.9832, delta=1e-3)

    def test_narrows_with_trials(self):
        low_small, high_small = wilson_band(0.95, 50)
        low_large, high_large = wilson_band(0.95, 5000)
        self.assertLess(high_large - low_large, high_small - low_small)
        self.assertEqual(wilson_band(0.95, 0), (0.0, 1.0))


class SmokeStudyTests(SimpleTestCase):
    def test_alg1_wide_interval(self):
        config = StudyConfig.from_preset('alg1', 'smoke', seed=11, gammas=(0.001, 0.999))
        result = run_study_alg1(config)
        self.assertEqual(list(result.table.columns), ['q', 'n'] + BAND_COLUMNS)
        self.assertEqual(len(result.table), 1)
        self.assertGreaterEqual(result.grand_mean, 0.9)

    def test_alg1_requires_two_sided(self):
        with self.assertRaises(InvalidInputError):
            run_study_alg1(StudyConfig.from_preset('alg1', 'smoke', seed=1, gammas=(0.95,)))

    def test_alg1_single_tau(self):
        config = StudyConfig.from_preset('alg1', 'smoke', seed=1, gammas=(0.025, 0.975), tau_list=(0.8, 0.9))
        with self.assertRaises(InvalidInputError):
            run_study_alg1(config)

    def test_alg3_reproducible(self):
        config = StudyConfig.from_preset('alg3', 'smoke', seed=12)
        first = run_study(config)
        second = run_study(config)
        self.assertEqual(list(first.table.columns), ['q', 'n', 'tau'] + BAND_COLUMNS)
        pd.testing.assert_frame_equal(first.table, second.table)
        self.assertEqual(first.cell_seeds, second.cell_seeds)

    def test_alg3_wide_upper_bound(self):
        config = StudyConfig.from_preset('alg3', 'smoke', seed=13, gammas=(0.999,))
        self.assertGreaterEqual(run_study_alg3(config).grand_mean, 0.9)

    def test_alg2_schema(self):
        config = StudyConfig.from_preset('alg2', 'smoke', seed=14)
        result = run_study_alg2(config)
        self.assertEqual(list(result.table.columns), ['rho', 'tau', 'n'] + BAND_COLUMNS)
        self.assertTrue(0.0 <= result.grand_mean <= 1.0)
        self.assertEqual(int(result.table['trials'].iloc[0]), 10)

    def test_wrong_runner(self):
        with self.assertRaises(InvalidInputError):
            run_study_alg2(StudyConfig.from_preset('alg3', 'smoke', seed=1))

    def test_outputs(self):
        result = run_study(StudyConfig.from_preset('alg3', 'smoke', seed=15))
        with tempfile.TemporaryDirectory() as tmp:
            files = write_study_outputs(result, tmp)
            header = Path(files['table']).read_text(encoding='utf-8').splitlines()[0]
            self.assertTrue(header.startswith('q,n,tau,p'))
            manifest = json.loads(Path(files['manifest']).read_text(encoding='utf-8'))
            self.assertEqual(manifest['study'], 'alg3')
            self.assertEqual(len(manifest['cell_seeds']), 1)


class SimulateCommandTests(SimpleTestCase):
    def test_smoke_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = StringIO()
            call_command('simulate', study='alg3', preset='smoke', seed=3, threads=1, out_dir=tmp, stdout=out)
            self.assertTrue((Path(tmp) / 'study_alg3_smoke.csv').is_file())
            manifest = json.loads((Path(tmp) / 'simulate_manifest.json').read_text(encoding='utf-8'))
            self.assertEqual(manifest['seed'], 3)
            self.assertEqual(manifest['config']['preset'], 'smoke')
            self.assertIn('numpy', manifest['versions'])


@slow
class DeskStudyTests(SimpleTestCase):
    def test_alg3_desk(self):
        result = run_study(StudyConfig.from_preset('alg3', 'desk', seed=2024, n_jobs=-1))
        self.assertTrue((result.table['p'] >= 0.90).all())
        self.assertGreaterEqual(result.grand_mean, 0.93)

    def test_alg1_desk(self):
        result = run_study(StudyConfig.from_preset('alg1', 'desk', seed=2024, n_jobs=-1))
        self.assertGreaterEqual(result.grand_mean, 0.90)

    def test_alg2_desk(self):
        result = run_study(StudyConfig.from_preset('alg2', 'desk', seed=2024, n_jobs=-1))
        table = result.table.set_index('rho')
        self.assertGreaterEqual(table.loc[0.0, 'p'], 0.85)
        self.assertGreaterEqual(table.loc[0.9, 'p'], 0.85)
        self.assertGreaterEqual(table.loc[-0.9, 'p'], 0.95)
