"""
覆盖率泛函 β 的蒙特卡洛估计

β̂ = 被分位数曲面"支配"的总体比例。判定用 CDF 条件 F(x) ≤ τ（边界点算在内），
不做几何网格测试。区域只需实现 contains(points) -> bool 数组。
"""
import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from core_stats.services.matrices import MvnModel
from mvn.services.distribution import CdfAccuracy, mvn_cdf_many, mvn_sample
from utils.exceptions import InvalidInputError

MIN_COVERAGE_SAMPLES = 10_000


class CoverageRegion(Protocol):
    def contains(self, points: np.ndarray) -> np.ndarray:
        ...


@dataclass(frozen=True)
class ModelQuantileRegion:
    """已知模型的 {x | F(x) ≤ τ}"""
    model: MvnModel
    tau: float
    acc: CdfAccuracy = CdfAccuracy(abs_tol=1e-5)

    def contains(self, points: np.ndarray) -> np.ndarray:
        return mvn_cdf_many(points, self.model, self.acc) <= self.tau


@dataclass(frozen=True)
class CriticalPointRegion:
    """临界点以下的卦限 {x | x ≤ v}"""
    point: np.ndarray

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.all(np.asarray(points) <= np.asarray(self.point), axis=1)


@dataclass(frozen=True)
class CoverageEstimate:
    beta: float
    std_error: float
    n_mc: int

    def as_dict(self) -> dict:
        return {'beta': self.beta, 'std_error': self.std_error, 'n_mc': self.n_mc}


def draw_coverage_samples(model: MvnModel, n_mc: int, seed=None) -> np.ndarray:
    """可在多次估计之间共享的总体样本"""
    n_mc = int(n_mc)
    if n_mc < MIN_COVERAGE_SAMPLES:
        raise InvalidInputError(f'n_mc 至少为 {MIN_COVERAGE_SAMPLES}，当前 {n_mc}')
    return mvn_sample(model, n_mc, seed).values


def estimate_coverage_beta(region: CoverageRegion, model: MvnModel, n_mc: int = 100_000,
                           seed=None, samples: np.ndarray = None) -> CoverageEstimate:
    """β̂ 及其标准误 √(β̂(1-β̂)/n_mc)"""
    if samples is None:
        samples = draw_coverage_samples(model, n_mc, seed)
    elif samples.shape[0] < MIN_COVERAGE_SAMPLES:
        raise InvalidInputError(f'共享样本至少需要 {MIN_COVERAGE_SAMPLES} 个')
    inside = region.contains(samples)
    beta = float(np.mean(inside))
    n = int(samples.shape[0])
    return CoverageEstimate(beta=beta, std_error=math.sqrt(beta * (1.0 - beta) / n), n_mc=n)
