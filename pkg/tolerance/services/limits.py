"""
单侧正态容许上限

k = t⁻¹_{n−1, δ}(1 − α) / √n，δ = √n·Φ⁻¹(β)（非中心 t 分布的精确因子），
上限 x̄ + k·s 以置信度 1 − α 覆盖总体的至少 β 比例。
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings
from scipy import stats

from core_stats.services.matrices import DataMatrix, sample_mean, sample_std
from utils.exceptions import InvalidInputError, NumericalError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ToleranceSpec:
    beta: float
    confidence: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise InvalidInputError(f'覆盖比例 β 必须在 (0, 1) 内，当前 {self.beta}')
        if not 0.0 < self.confidence < 1.0:
            raise InvalidInputError(f'置信度必须在 (0, 1) 内，当前 {self.confidence}')
        if int(self.n) < 2:
            raise InvalidInputError(f'样本量至少为 2，当前 {self.n}')
        object.__setattr__(self, 'n', int(self.n))


def _approximate_factor(spec: ToleranceSpec) -> float:
    # 大样本近似，仅在非中心 t 分位数无法求得时使用
    z_beta = stats.norm.ppf(spec.beta)
    z_conf = stats.norm.ppf(spec.confidence)
    return z_beta + z_conf * math.sqrt(1.0 / spec.n + z_beta ** 2 / (2.0 * (spec.n - 1)))


def tolerance_factor(spec: ToleranceSpec) -> float:
    """单侧容许因子 k"""
    root_n = math.sqrt(spec.n)
    delta = root_n * stats.norm.ppf(spec.beta)
    k = float(stats.nct.ppf(spec.confidence, spec.n - 1, delta)) / root_n
    if not math.isfinite(k):
        k = _approximate_factor(spec)
        logger.warning(f'n={spec.n} 的非中心 t 分位数不可用，改用大样本近似 k={k:.6f}')
    return k


def univariate_upper_tolerance(sample_mean: float, sample_sd: float, spec: ToleranceSpec) -> float:
    if not sample_sd > 0:
        raise InvalidInputError(f'样本标准差必须大于 0，当前 {sample_sd}')
    return float(sample_mean + tolerance_factor(spec) * sample_sd)


def simultaneous_upper_tolerance(data: DataMatrix, beta: float, confidence: float) -> np.ndarray:
    """逐列容许上限，置信度按 Bonferroni 调整为 1 − α/q"""
    adjusted = 1.0 - (1.0 - float(confidence)) / data.q
    spec = ToleranceSpec(beta=beta, confidence=adjusted, n=data.n)
    means, sds = sample_mean(data), sample_std(data)
    return np.array([univariate_upper_tolerance(m, s, spec) for m, s in zip(means, sds)])


def univariate_upper_tolerances(data: DataMatrix, beta: float, confidence: float) -> np.ndarray:
    """不做调整的逐列容许上限"""
    spec = ToleranceSpec(beta=beta, confidence=confidence, n=data.n)
    means, sds = sample_mean(data), sample_std(data)
    return np.array([univariate_upper_tolerance(m, s, spec) for m, s in zip(means, sds)])


def chi_square_quantile(prob: float, dof: int, cap: Optional[float] = None) -> float:
    prob = float(prob)
    dof = int(dof)
    if not 0.0 < prob < 1.0:
        raise InvalidInputError(f'概率必须在 (0, 1) 内，当前 {prob}')
    if dof < 1:
        raise InvalidInputError(f'自由度至少为 1，当前 {dof}')
    cap = cap if cap is not None else getattr(settings, 'QUANTILE', {}).get('CHI2_CAP', 1e308)
    value = float(stats.chi2.ppf(prob, dof))
    if not math.isfinite(value) or value > cap:
        raise InvalidInputError(f'χ²_{dof} 在 {prob} 处的分位数超过上限 {cap:g}')
    return value
