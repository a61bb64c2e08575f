"""
临界点的自助法置信区间

每个重复样本用它自己的均值和标准差把等坐标分位数映射回去：
v* = v(τ; C*)·s* + x̄*。在标准化数据上做重抽样，最后整体乘 σ 加 μ，
这与直接在原始数据上计算完全等价（仿射等变）。
"""
import logging
import time
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from bootstrap.services.config import BootstrapConfig, PercentileRequest
from bootstrap.services.intervals import confidence_interval
from core_stats.services.matrices import DataMatrix, destandardize, sample_corr, sample_mean, sample_std, standardize
from mvn.services.distribution import CdfAccuracy
from quantiles.services.critical import equicoordinate_quantile
from .common import bootstrap_statistic, check_sample_size, check_tau, jackknife_statistic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriticalPointCi:
    tau: float
    gammas: tuple
    points: dict
    b: int
    estimate: np.ndarray
    method: str
    labels: tuple = ()
    fallback: bool = False
    replicates: np.ndarray = field(default=None, compare=False, repr=False)
    duration: float = 0.0

    def point(self, gamma: float) -> np.ndarray:
        return self.points[float(gamma)]

    def as_dict(self) -> dict:
        return {
            'tau': self.tau,
            'gammas': list(self.gammas),
            'labels': list(self.labels),
            'points': {str(g): [float(v) for v in p] for g, p in self.points.items()},
            'estimate': [float(v) for v in self.estimate],
            'b': self.b,
            'ci_method': self.method,
            'fallback': self.fallback,
            'duration_seconds': round(self.duration, 3),
        }


def replicate_critical_point(replicate: DataMatrix, tau: float, acc: CdfAccuracy) -> np.ndarray:
    """v(τ; C*)·s* + x̄*"""
    v = equicoordinate_quantile(tau, sample_corr(replicate), acc)
    return v * sample_std(replicate) + sample_mean(replicate)


def algorithm3_critical_point_ci(data: DataMatrix, tau: float, request: PercentileRequest,
                                 config: BootstrapConfig, acc: CdfAccuracy = None) -> CriticalPointCi:
    tau = check_tau(tau)
    check_sample_size(data)
    acc = acc or CdfAccuracy.from_settings()
    started = time.perf_counter()
    standardized = standardize(data)
    work = standardized.as_data_matrix()
    statistic = partial(replicate_critical_point, tau=tau, acc=acc)

    estimate = statistic(work)
    replicates = bootstrap_statistic(work, config, statistic, desc='critical point')
    jackknife = None
    if config.ci_method == 'bca':
        jackknife = jackknife_statistic(work, statistic, n_jobs=config.n_jobs)
    interval = confidence_interval(replicates, request, config.ci_method, theta_hat=estimate,
                                   jackknife_values=jackknife)

    def to_original(points):
        return destandardize(points, standardized.centering, standardized.scaling)

    points = {g: to_original(interval.values[i]) for i, g in enumerate(request.gammas)}
    duration = time.perf_counter() - started
    logger.info(f'临界点区间完成：τ={tau}, q={data.q}, b={config.b}, 用时 {duration:.2f}s')
    return CriticalPointCi(
        tau=tau,
        gammas=request.gammas,
        points=points,
        b=config.b,
        estimate=to_original(estimate),
        method=interval.method,
        labels=data.column_labels(),
        fallback=interval.fallback,
        replicates=to_original(replicates),
        duration=duration,
    )
