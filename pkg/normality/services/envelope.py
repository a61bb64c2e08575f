"""
马氏距离平方 QQ 图的蒙特卡洛置信带
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats
from tqdm import tqdm

from utils.exceptions import InvalidInputError
from utils.rng import make_rng

logger = logging.getLogger(__name__)

TRIAL_CHUNK = 1000


@dataclass(frozen=True)
class QqEnvelope:
    """第 i 个顺序统计量的 (lower, theoretical, upper)"""
    lower: np.ndarray
    theoretical: np.ndarray
    upper: np.ndarray
    confidence: float
    n_mc: int

    @property
    def n(self) -> int:
        return self.theoretical.size

    def inside(self, d) -> np.ndarray:
        """逐秩判断排序后的 d 是否落在带内"""
        d = np.sort(np.asarray(d, dtype=float).ravel())
        if d.size != self.n:
            raise InvalidInputError(f'距离个数 {d.size} 与置信带长度 {self.n} 不一致')
        return (d >= self.lower) & (d <= self.upper)

    def contains(self, d) -> bool:
        return bool(np.all(self.inside(d)))

    def as_dict(self) -> dict:
        return {
            'confidence': self.confidence,
            'n_mc': self.n_mc,
            'rows': [
                {'rank': i + 1, 'lower': float(lo), 'theoretical': float(th), 'upper': float(up)}
                for i, (lo, th, up) in enumerate(zip(self.lower, self.theoretical, self.upper))
            ],
        }


def plotting_positions(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def _sorted_distances(samples: np.ndarray) -> np.ndarray:
    """samples: (trials, n, q) → 每次试验排序后的马氏距离平方 (trials, n)"""
    n = samples.shape[1]
    centered = samples - samples.mean(axis=1, keepdims=True)
    cov = np.einsum('tni,tnj->tij', centered, centered) / (n - 1)
    solved = np.linalg.solve(cov, np.swapaxes(centered, 1, 2))
    d = np.einsum('tni,tin->tn', centered, solved)
    return np.sort(d, axis=1)


def qq_envelope(n: int, q: int, confidence: float = 0.95, n_mc: int = 10_000, seed=None) -> QqEnvelope:
    n, q, n_mc = int(n), int(q), int(n_mc)
    if n <= q:
        raise InvalidInputError(f'样本量 n={n} 必须大于变量个数 q={q}')
    if not 0.0 < confidence < 1.0:
        raise InvalidInputError(f'置信度必须在 (0, 1) 内，当前 {confidence}')
    if n_mc < 100:
        raise InvalidInputError(f'n_mc 至少为 100，当前 {n_mc}')
    rng = make_rng(seed)
    sorted_d = np.empty((n_mc, n))
    for start in tqdm(range(0, n_mc, TRIAL_CHUNK), desc='QQ 置信带', disable=None, leave=False):
        size = min(TRIAL_CHUNK, n_mc - start)
        sorted_d[start:start + size] = _sorted_distances(rng.standard_normal((size, n, q)))
    alpha = 1.0 - confidence
    lower, upper = np.quantile(sorted_d, [alpha / 2, 1.0 - alpha / 2], axis=0, method='linear')
    theoretical = stats.chi2.ppf(plotting_positions(n), q)
    return QqEnvelope(lower=lower, theoretical=theoretical, upper=upper, confidence=float(confidence), n_mc=n_mc)
