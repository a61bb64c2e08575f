"""
联合分位概率的不确定度

每个重复样本：重抽样 → 相关矩阵 C* → τ_J* = F(Φ⁻¹(τ_i)·1; 0, C*)，
再对 b 个 τ_J* 取百分位（或偏差校正 / BCa）置信限。
τ_J 是 CDF 值，和分位数集合一样，γ 对应 τ_J* 的 (1 − γ) 水平：
γ = 0.05 给出单侧 95% 的上限。
"""
import logging
import time
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from bootstrap.services.config import BootstrapConfig, PercentileRequest
from bootstrap.services.intervals import confidence_interval
from core_stats.services.matrices import DataMatrix, sample_corr
from mvn.services.distribution import CdfAccuracy
from quantiles.services.probability import bonferroni_bounds, joint_quantile_probability
from .common import bootstrap_statistic, check_sample_size, check_tau, jackknife_statistic

logger = logging.getLogger(__name__)

SANDWICH_SLACK = 1e-6


@dataclass(frozen=True)
class JointTauInterval:
    gammas: tuple
    tau_values: tuple
    b: int
    tau_individual: float
    estimate: float
    method: str
    fallback: bool = False
    replicates: np.ndarray = field(default=None, compare=False, repr=False)
    duration: float = 0.0

    def as_dict(self) -> dict:
        return {
            'tau_individual': self.tau_individual,
            'gammas': list(self.gammas),
            'tau_values': list(self.tau_values),
            'estimate': self.estimate,
            'b': self.b,
            'ci_method': self.method,
            'fallback': self.fallback,
            'duration_seconds': round(self.duration, 3),
        }


def _joint_tau(replicate: DataMatrix, tau_individual: float, acc: CdfAccuracy) -> float:
    # 标准化不改变相关矩阵，直接用样本相关
    return joint_quantile_probability(tau_individual, sample_corr(replicate), acc)


def algorithm1_joint_tau_uq(data: DataMatrix, tau_individual: float, request: PercentileRequest,
                            config: BootstrapConfig, acc: CdfAccuracy = None) -> JointTauInterval:
    tau_individual = check_tau(tau_individual, 'tau_individual')
    check_sample_size(data)
    acc = acc or CdfAccuracy.from_settings()
    started = time.perf_counter()
    statistic = partial(_joint_tau, tau_individual=tau_individual, acc=acc)

    estimate = statistic(data)
    replicates = bootstrap_statistic(data, config, statistic, desc='joint tau')
    bounds = bonferroni_bounds(tau_individual, data.q)
    outside = (replicates < bounds.lower - SANDWICH_SLACK) | (replicates > bounds.upper + SANDWICH_SLACK)
    if np.any(outside):
        logger.warning(f'{int(outside.sum())} 个重复样本的 τ_J 超出 Bonferroni 界 [{bounds.lower}, {bounds.upper}]')

    jackknife = None
    if config.ci_method == 'bca':
        jackknife = jackknife_statistic(data, statistic, n_jobs=config.n_jobs)
    levels = PercentileRequest(tuple(1.0 - g for g in request.gammas))
    order = [int(np.argmin(np.abs(np.asarray(levels.gammas) - (1.0 - g)))) for g in request.gammas]
    interval = confidence_interval(replicates, levels, config.ci_method, theta_hat=estimate,
                                   jackknife_values=jackknife)
    duration = time.perf_counter() - started
    logger.info(f'联合分位概率区间完成：τ_i={tau_individual}, b={config.b}, 用时 {duration:.2f}s')
    return JointTauInterval(
        gammas=request.gammas,
        tau_values=tuple(float(interval.values[i]) for i in order),
        b=config.b,
        tau_individual=tau_individual,
        estimate=float(estimate),
        method=interval.method,
        fallback=interval.fallback,
        replicates=replicates,
        duration=duration,
    )
