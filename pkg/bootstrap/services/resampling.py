"""
重抽样

参数法：从 N(0, S) 抽 n 行，S 为（标准化后）数据的样本协方差；
非参数法：有放回地抽 n 行。样本协方差奇异时重抽，最多 100 次。
"""
import logging

import numpy as np

from core_stats.services.matrices import DataMatrix, is_positive_definite, sample_cov
from mvn.services.distribution import sampling_factor
from utils.exceptions import DegenerateResampleError, InsufficientSamplesError
from utils.rng import make_rng
from .config import BootstrapConfig

logger = logging.getLogger(__name__)

MAX_RESAMPLE_RETRIES = 100


def _degenerate(values: np.ndarray) -> bool:
    """零方差列总是退化；二元共线（|ρ| = 1）的 CDF 仍有定义，q ≥ 3 要求正定"""
    if np.any(np.ptp(values, axis=0) == 0):
        return True
    if values.shape[1] < 3:
        return False
    return not is_positive_definite(sample_cov(values))


def _draw(values: np.ndarray, style: str, rng: np.random.Generator, factor=None) -> np.ndarray:
    n, q = values.shape
    if style == 'parametric':
        return rng.standard_normal((n, q)) @ factor.T
    return values[rng.integers(0, n, size=n)]


def resample(data: DataMatrix, config: BootstrapConfig, rng=None) -> DataMatrix:
    """一次重抽样；rng 可以是种子、SeedSequence 或 Generator"""
    if data.n < 2:
        raise InsufficientSamplesError(f'重抽样至少需要 2 行数据，当前 {data.n}')
    rng = make_rng(config.seed if rng is None else rng)
    values = data.values
    factor = sampling_factor(sample_cov(values)) if config.style == 'parametric' else None
    for attempt in range(MAX_RESAMPLE_RETRIES):
        drawn = _draw(values, config.style, rng, factor)
        if not _degenerate(drawn):
            if attempt:
                logger.warning(f'重抽样退化，第 {attempt + 1} 次重抽后成功')
            return data.with_values(drawn)
    raise DegenerateResampleError(
        f'{config.style} 重抽样连续 {MAX_RESAMPLE_RETRIES} 次得到奇异样本协方差（n={data.n}）'
    )


def jackknife_samples(data: DataMatrix):
    """依次去掉一行（BCa 加速常数用）"""
    values = data.values
    for i in range(data.n):
        yield data.with_values(np.delete(values, i, axis=0))
