"""
椭圆容许域 {x | (x − x̄)ᵀ S⁻¹ (x − x̄) ≤ r}

r 用蒙特卡洛求：外层模拟 x̄ ~ N(0, I/n)、S ~ Wishart(n − 1, I)/(n − 1)，
对每次外层抽样求使覆盖率恰为 β 的阈值，再取这些阈值的置信度分位数。
内层样本在所有外层抽样间共享：半径按 χ²_q 分层，方向来自打乱的 Sobol 序列。
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats
from scipy.stats import qmc
from tqdm import tqdm

from core_stats.services.matrices import DataMatrix, MvnModel, mahalanobis_sq_many, sample_cov, sample_mean
from meshes.services.contours import QuantileSet, elliptical_boundary
from utils.exceptions import InvalidInputError
from utils.rng import draw_system_seed, make_rng, spawn_seeds

logger = logging.getLogger(__name__)

INNER_SAMPLES = 2 ** 13
OUTER_CHUNK = 64


def _inner_points(q: int, seed) -> np.ndarray:
    """N(0, I_q) 的分层样本"""
    inner_seed, perm_seed = spawn_seeds(seed, 2)
    radius = np.sqrt(stats.chi2.ppf((np.arange(INNER_SAMPLES) + 0.5) / INNER_SAMPLES, q))
    if q == 1:
        signs = np.where(np.arange(INNER_SAMPLES) % 2 == 0, 1.0, -1.0)
        directions = signs[:, None]
    else:
        sobol = qmc.Sobol(d=q, scramble=True, rng=make_rng(inner_seed))
        normals = stats.norm.ppf(np.clip(sobol.random(INNER_SAMPLES), 1e-12, 1 - 1e-12))
        directions = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    directions = make_rng(perm_seed).permutation(directions)
    return radius[:, None] * directions


def _wishart(n: int, q: int, size: int, rng: np.random.Generator) -> np.ndarray:
    draws = stats.wishart.rvs(df=n - 1, scale=np.eye(q), size=size, random_state=rng)
    return np.asarray(draws, dtype=float).reshape(size, q, q) / (n - 1)


def tolerance_region_factor(n: int, q: int, beta: float, confidence: float,
                            n_mc: int = 100_000, seed=None) -> float:
    n, q, n_mc = int(n), int(q), int(n_mc)
    if n <= q:
        raise InvalidInputError(f'样本量 n={n} 必须大于变量个数 q={q}')
    for name, value in (('beta', beta), ('confidence', confidence)):
        if not 0.0 < value < 1.0:
            raise InvalidInputError(f'{name} 必须在 (0, 1) 内，当前 {value}')
    if n_mc < 100:
        raise InvalidInputError(f'n_mc 至少为 100，当前 {n_mc}')
    if seed is None:
        seed = draw_system_seed()
    inner_seed, outer_seed = spawn_seeds(seed, 2)
    inner = _inner_points(q, inner_seed)
    rng = make_rng(outer_seed)

    thresholds = np.empty(n_mc)
    chunks = range(0, n_mc, OUTER_CHUNK)
    for start in tqdm(chunks, desc='容许域因子', disable=None, leave=False):
        size = min(OUTER_CHUNK, n_mc - start)
        means = rng.standard_normal((size, q)) / np.sqrt(n)
        covs = _wishart(n, q, size, rng)
        inverse_factors = np.linalg.inv(np.linalg.cholesky(covs))
        diff = inner[None, :, :] - means[:, None, :]
        z = np.einsum('kij,knj->kni', inverse_factors, diff)
        quad = np.sum(z * z, axis=2)
        thresholds[start:start + size] = np.quantile(quad, beta, axis=1)
    r = float(np.quantile(thresholds, confidence))
    logger.info(f'容许域因子 r={r:.4f}（n={n}, q={q}, β={beta}, 置信度={confidence}, n_mc={n_mc}）')
    return r


@dataclass(frozen=True)
class EllipticalRegion:
    center: np.ndarray
    cov: np.ndarray
    r: float
    beta: float
    confidence: float
    boundary: Optional[QuantileSet] = None

    def contains(self, points) -> np.ndarray:
        return mahalanobis_sq_many(points, self.center, self.cov) <= self.r

    def as_dict(self) -> dict:
        return {
            'center': [float(v) for v in self.center],
            'cov': np.asarray(self.cov).tolist(),
            'r': self.r,
            'beta': self.beta,
            'confidence': self.confidence,
        }


def elliptical_tolerance_region(data: DataMatrix, beta: float, confidence: float,
                                n_mc: int = 100_000, seed=None) -> EllipticalRegion:
    """样本均值为中心的椭圆容许域；二元时附带边界折线"""
    center, cov = sample_mean(data), sample_cov(data)
    r = tolerance_region_factor(data.n, data.q, beta, confidence, n_mc=n_mc, seed=seed)
    boundary = elliptical_boundary(MvnModel(center, cov), r) if data.q == 2 else None
    return EllipticalRegion(center=center, cov=cov, r=r, beta=float(beta), confidence=float(confidence),
                            boundary=boundary)
