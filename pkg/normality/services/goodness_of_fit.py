"""
马氏距离平方对 χ²_q 的拟合优度

Anderson–Darling：完全指定分布下的统计量，p 值用 Marsaglia 的极限分布近似加有限样本修正；
Kolmogorov–Smirnov：scipy.stats.kstest，小样本时用精确分布。
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from utils.exceptions import InsufficientSamplesError, InvalidInputError

MIN_TEST_SAMPLES = 5


@dataclass(frozen=True)
class FitTestResult:
    statistic: float
    p_value: float
    method: str

    def as_dict(self) -> dict:
        return {'statistic': self.statistic, 'p_value': self.p_value, 'method': self.method}


def _distances(d, dof: int) -> np.ndarray:
    d = np.asarray(d, dtype=float).ravel()
    if int(dof) < 1:
        raise InvalidInputError(f'自由度至少为 1，当前 {dof}')
    if d.size < MIN_TEST_SAMPLES:
        raise InsufficientSamplesError(f'检验至少需要 {MIN_TEST_SAMPLES} 个距离，当前 {d.size}')
    if not np.all(np.isfinite(d)):
        raise InvalidInputError('距离包含非有限值')
    return d


def _adinf(z: float) -> float:
    """A² 极限分布函数"""
    if z <= 0:
        return 0.0
    if z < 2:
        return math.exp(-1.2337141 / z) / math.sqrt(z) * (
            2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) * z
        )
    return math.exp(-math.exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z))


def _errfix(n: int, x: float) -> float:
    """有限 n 的修正项"""
    if x > 0.8:
        return (-130.2137 + (745.2337 - (1705.091 - (1950.646 - (1116.360 - 255.7844 * x) * x) * x) * x) * x) / n
    c = 0.01265 + 0.1757 / n
    if x < c:
        t = x / c
        t = math.sqrt(t) * (1.0 - t) * (49 * t - 102)
        return t * (0.0037 / (n * n) + 0.00078 / n + 0.00006) / n
    t = (x - c) / (0.8 - c)
    t = -0.00022633 + (6.54034 - (14.6538 - (14.458 - (8.259 - 1.91864 * t) * t) * t) * t) * t
    return t * (0.04213 + 0.01365 / n) / n


def anderson_darling_cdf(n: int, statistic: float) -> float:
    x = _adinf(statistic)
    return float(np.clip(x + _errfix(n, x), 0.0, 1.0))


def ad_test_chisq(d, dof: int) -> FitTestResult:
    d = _distances(d, dof)
    n = d.size
    tiny = np.finfo(float).tiny
    z = np.clip(np.sort(stats.chi2.cdf(d, dof)), tiny, 1.0 - 1e-16)
    i = np.arange(1, n + 1)
    statistic = float(-n - np.sum((2 * i - 1) * (np.log(z) + np.log1p(-z[::-1]))) / n)
    return FitTestResult(statistic, 1.0 - anderson_darling_cdf(n, statistic), 'anderson-darling')


def ks_test_chisq(d, dof: int) -> FitTestResult:
    d = _distances(d, dof)
    result = stats.kstest(d, 'chi2', args=(int(dof),), method='auto')
    return FitTestResult(float(result.statistic), float(result.pvalue), 'kolmogorov-smirnov')
