"""
单个数据集的正态性诊断汇总（案例研究逐频率调用）
"""
import logging
from dataclasses import dataclass

import numpy as np

from core_stats.services.matrices import DataMatrix, mahalanobis_sq_all
from .envelope import QqEnvelope, qq_envelope
from .goodness_of_fit import ad_test_chisq, ks_test_chisq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalityReport:
    distances: np.ndarray
    ad_p: float
    ks_p: float
    qq_pass: bool
    envelope: QqEnvelope
    alpha: float = 0.05

    @property
    def passed(self) -> bool:
        return self.qq_pass and self.ad_p >= self.alpha and self.ks_p >= self.alpha

    def as_dict(self) -> dict:
        return {
            'distances': [float(v) for v in self.distances],
            'ad_p': self.ad_p,
            'ks_p': self.ks_p,
            'qq_pass': self.qq_pass,
            'passed': self.passed,
            'alpha': self.alpha,
            'envelope': self.envelope.as_dict(),
        }


def normality_report(data: DataMatrix, confidence: float = 0.95, n_mc: int = 10_000,
                     seed=None, alpha: float = 0.05) -> NormalityReport:
    distances = mahalanobis_sq_all(data)
    envelope = qq_envelope(data.n, data.q, confidence=confidence, n_mc=n_mc, seed=seed)
    report = NormalityReport(
        distances=distances,
        ad_p=ad_test_chisq(distances, data.q).p_value,
        ks_p=ks_test_chisq(distances, data.q).p_value,
        qq_pass=envelope.contains(distances),
        envelope=envelope,
        alpha=alpha,
    )
    if not report.passed:
        logger.warning(f'正态性诊断未通过: AD p={report.ad_p:.4f}, KS p={report.ks_p:.4f}, QQ={report.qq_pass}')
    return report
