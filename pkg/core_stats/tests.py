import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from casestudy.services.fixtures import FIXTURE_MAHALANOBIS_SQ, fixture_matrix
from utils.exceptions import DegenerateColumnError, InvalidInputError, SingularMatrixError
from .services.ingest import read_data_csv
from .services.matrices import (
    DataMatrix,
    MvnModel,
    cholesky_factor,
    destandardize,
    is_positive_definite,
    mahalanobis_sq,
    mahalanobis_sq_all,
    sample_corr,
    sample_cov,
    standardize,
)


class DataMatrixTests(SimpleTestCase):
    def test_rejects_non_finite(self):
        with self.assertRaises(InvalidInputError):
            DataMatrix([[1.0, np.nan], [2.0, 3.0]])

    def test_vector_becomes_column(self):
        data = DataMatrix([1.0, 2.0, 3.0])
        self.assertEqual((data.n, data.q), (3, 1))

    def test_default_labels(self):
        self.assertEqual(DataMatrix(np.zeros((2, 3))).column_labels(), ('x1', 'x2', 'x3'))


class MvnModelTests(SimpleTestCase):
    def test_asymmetric_cov_rejected(self):
        with self.assertRaises(InvalidInputError):
            MvnModel([0, 0], [[1.0, 0.5], [0.4, 1.0]])

    def test_indefinite_cov_rejected(self):
        with self.assertRaises(InvalidInputError):
            MvnModel([0, 0], [[1.0, 2.0], [2.0, 1.0]])

    def test_zero_variance_rejected(self):
        with self.assertRaises(InvalidInputError):
            MvnModel([0, 0], [[0.0, 0.0], [0.0, 1.0]])

    def test_from_correlation(self):
        model = MvnModel.from_correlation([1, 2], [[1, 0.5], [0.5, 1]], [2, 3])
        np.testing.assert_allclose(model.cov, [[4, 3], [3, 9]])
        np.testing.assert_allclose(model.correlation(), [[1, 0.5], [0.5, 1]])


class StandardizeTests(SimpleTestCase):
    def test_round_trip(self):
        rng = np.random.default_rng(3)
        values = rng.normal(5.0, 2.0, size=(40, 3))
        standardized = standardize(values)
        np.testing.assert_allclose(standardized.values.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(standardized.values.var(axis=0, ddof=1), 1.0, atol=1e-8)
        restored = destandardize(standardized.values, standardized.centering, standardized.scaling)
        np.testing.assert_allclose(restored, values, rtol=1e-10)

    def test_correlation_is_preserved(self):
        values = fixture_matrix().values
        np.testing.assert_allclose(sample_corr(standardize(values).values), sample_corr(values), atol=1e-12)

    def test_constant_column(self):
        values = np.column_stack([np.arange(5.0), np.full(5, 2.0)])
        with self.assertRaises(DegenerateColumnError) as ctx:
            standardize(values)
        self.assertEqual(ctx.exception.column, 1)


class MahalanobisTests(SimpleTestCase):
    def test_fixture_distances(self):
        np.testing.assert_allclose(mahalanobis_sq_all(fixture_matrix()), FIXTURE_MAHALANOBIS_SQ, atol=0.03)

    def test_distances_sum_to_dof(self):
        # Σ d_j = (n−1)·q
        data = fixture_matrix()
        self.assertAlmostEqual(float(mahalanobis_sq_all(data).sum()), (data.n - 1) * data.q, places=8)

    def test_identity_covariance(self):
        self.assertAlmostEqual(mahalanobis_sq([3.0, 4.0], [0.0, 0.0], np.eye(2)), 25.0)

    def test_singular_covariance(self):
        self.assertFalse(is_positive_definite([[1.0, 1.0], [1.0, 1.0]]))
        with self.assertRaises(SingularMatrixError):
            mahalanobis_sq([1.0, 1.0], [0.0, 0.0], [[1.0, 1.0], [1.0, 1.0]])

    def test_rank_deficient_trivariate(self):
        x = np.linspace(1.0, 3.0, 12)
        cov = np.cov(np.column_stack([x, x ** 2, x + x ** 2]), rowvar=False)
        self.assertFalse(is_positive_definite(cov))
        with self.assertRaises(SingularMatrixError):
            cholesky_factor(cov)

    def test_scale_disparity_is_not_singular(self):
        cov = np.array([[1e-6, 0.5], [0.5, 1e6]])
        self.assertTrue(is_positive_definite(cov))
        self.assertEqual(cholesky_factor(cov).shape, (2, 2))

    def test_sample_cov_unbiased(self):
        np.testing.assert_allclose(sample_cov([[0.0], [2.0]]), [[2.0]])


class IngestTests(SimpleTestCase):
    def test_header_detected(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'data.csv'
            path.write_text('X,Y\n1,2\n3,4\n\n5,7\n', encoding='utf-8')
            data = read_data_csv(path)
        self.assertEqual(data.labels, ('X', 'Y'))
        self.assertEqual(data.n, 3)

    def test_bad_cell_reports_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'data.csv'
            path.write_text('1,2\n3,abc\n', encoding='utf-8')
            with self.assertRaisesMessage(InvalidInputError, '第 2 行'):
                read_data_csv(path)

    def test_missing_file(self):
        with self.assertRaises(InvalidInputError):
            read_data_csv('/nonexistent/data.csv')
