import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from bootstrap.services.config import BootstrapConfig
from core_stats.services.matrices import DataMatrix
from utils.exceptions import InvalidInputError
from .services.ensemble import SrsEnsemble, load_ensemble, read_long_csv
from .services.fixtures import FIXTURE_FREQUENCY, FIXTURE_VALUES, REFERENCE, fixture_ensemble, fixture_matrix
from .services.specification import run_case_study, specification_table, write_specification


def _long_frame(frequencies, matrices, axes=('X', 'Y')):
    rows = []
    for frequency, values in zip(frequencies, matrices):
        for sample, row in enumerate(values):
            for axis, value in zip(axes, row):
                rows.append({'frequency': frequency, 'sample_id': sample, 'axis': axis, 'value': value})
    return pd.DataFrame(rows)


class EnsembleTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(1)
        self.matrices = [rng.normal(size=(6, 2)) for _ in range(2)]
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_long_csv(self):
        path = self.root / 'srs.csv'
        # 频率乱序写入，读取后升序
        _long_frame([300.0, 100.0], self.matrices).to_csv(path, index=False)
        ensemble = read_long_csv(path)
        self.assertEqual(ensemble.frequencies, (100.0, 300.0))
        self.assertEqual((ensemble.n, ensemble.q, len(ensemble)), (6, 2, 2))
        self.assertEqual(ensemble.labels, ('X', 'Y'))
        np.testing.assert_allclose(ensemble.matrices[0].values, self.matrices[1])

    def test_directory(self):
        for frequency, values in zip((50.5, 20.0), self.matrices):
            pd.DataFrame(values, columns=['X', 'Y']).to_csv(self.root / f'{frequency}.csv', index=False)
        (self.root / 'notes.csv').write_text('a,b\n1,2\n', encoding='utf-8')
        ensemble = load_ensemble(self.root)
        self.assertEqual(ensemble.frequencies, (20.0, 50.5))
        self.assertEqual(ensemble.labels, ('X', 'Y'))

    def test_missing_axis_value(self):
        frame = _long_frame([100.0], self.matrices[:1]).iloc[:-1]
        path = self.root / 'short.csv'
        frame.to_csv(path, index=False)
        with self.assertRaises(InvalidInputError):
            read_long_csv(path)

    def test_missing_columns(self):
        path = self.root / 'bad.csv'
        path.write_text('frequency,value\n1,2\n', encoding='utf-8')
        with self.assertRaises(InvalidInputError):
            read_long_csv(path)

    def test_validation(self):
        matrices = tuple(DataMatrix(m) for m in self.matrices)
        with self.assertRaises(InvalidInputError):
            SrsEnsemble((200.0, 100.0), matrices, ('X', 'Y'))
        with self.assertRaises(InvalidInputError):
            SrsEnsemble((100.0, 200.0), (matrices[0], DataMatrix(self.matrices[1][:4])), ('X', 'Y'))
        with self.assertRaises(InvalidInputError):
            SrsEnsemble((100.0, 200.0), matrices, ('X',))


class CaseStudyTests(SimpleTestCase):
    def test_fixture_line(self):
        lines = run_case_study(fixture_ensemble(), config=BootstrapConfig(b=500, ci_method='bca', seed=5))
        self.assertEqual(len(lines), 1)
        line = lines[0]
        self.assertTrue(line.ok)
        self.assertEqual(line.frequency, FIXTURE_FREQUENCY)
        np.testing.assert_allclose(line.univariate_tolerance, REFERENCE['univariate_tolerance'], atol=0.01)
        np.testing.assert_allclose(line.bonferroni_tolerance, REFERENCE['bonferroni_tolerance'], atol=0.01)
        self.assertTrue(np.all(line.critical_point_ci > line.univariate_tolerance))
        self.assertAlmostEqual(line.ks_p, REFERENCE['ks_p'], delta=0.02)
        self.assertGreater(line.tau_joint, 0.7)
        self.assertLess(line.tau_joint, 0.9)

    def test_failure_is_recorded_per_frequency(self):
        degenerate = FIXTURE_VALUES.copy()
        degenerate[:, 2] = 3.0
        ensemble = SrsEnsemble((100.0, 200.0), (DataMatrix(degenerate), fixture_matrix()), ('X', 'Y', 'Z'))
        lines = run_case_study(ensemble, config=BootstrapConfig(b=100, ci_method='percentile', seed=6))
        self.assertFalse(lines[0].ok)
        self.assertTrue(lines[1].ok)
        table = specification_table(lines)
        self.assertTrue(np.isnan(table.loc[0, 'Z_critical_point']))
        self.assertEqual(table.loc[1, 'error'], '')

    def test_table_columns(self):
        lines = run_case_study(fixture_ensemble(), config=BootstrapConfig(b=100, seed=7))
        columns = list(specification_table(lines).columns)
        self.assertEqual(columns[:4], ['frequency', 'X_critical_point', 'X_univariate', 'X_bonferroni'])
        self.assertIn('tau_joint', columns)
        with tempfile.TemporaryDirectory() as tmp:
            files = write_specification(lines, tmp, manifest={'tau': 0.9})
            payload = json.loads(Path(files['manifest']).read_text(encoding='utf-8'))
            self.assertEqual(payload['tau'], 0.9)
            self.assertEqual(len(payload['lines'][0]['distances']), 9)


class CaseStudyCommandTests(SimpleTestCase):
    def test_fixture_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = StringIO()
            call_command('casestudy', b=200, seed=1, threads=1, out_dir=tmp, stdout=out)
            table = pd.read_csv(Path(tmp) / 'specification.csv')
            self.assertEqual(len(table), 1)
            self.assertIn('200.24 Hz', out.getvalue())
            manifest = json.loads((Path(tmp) / 'casestudy_manifest.json').read_text(encoding='utf-8'))
            self.assertEqual(manifest['config']['ci_method'], 'bca')
            self.assertEqual(manifest['result']['failed'], 0)

    def test_missing_data_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                call_command('casestudy', data=str(Path(tmp) / 'absent.csv'), threads=1, out_dir=tmp,
                             stdout=StringIO())
            self.assertEqual(ctx.exception.returncode, 2)
