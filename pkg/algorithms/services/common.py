"""
三个算法共用的前置检查与重复样本统计
"""
import logging
from typing import Callable

import numpy as np

from bootstrap.services.config import BootstrapConfig
from bootstrap.services.parallel import run_replicates, run_tasks
from bootstrap.services.resampling import jackknife_samples, resample
from core_stats.services.matrices import DataMatrix
from utils.exceptions import InsufficientSamplesError, InvalidInputError
from utils.rng import make_rng

logger = logging.getLogger(__name__)


def check_tau(tau: float, name: str = 'tau') -> float:
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise InvalidInputError(f'{name} 必须在 (0, 1) 内，当前 {tau}')
    return tau


def check_sample_size(data: DataMatrix) -> None:
    """自助法至少需要 q + 2 行"""
    if data.n < data.q + 2:
        raise InsufficientSamplesError(f'样本量 n={data.n} 小于 q + 2 = {data.q + 2}')


class _ReplicateStatistic:
    """可被 joblib 序列化的"重抽样 → 统计量"任务"""

    def __init__(self, data: DataMatrix, config: BootstrapConfig, statistic: Callable):
        self.data = data
        self.config = config
        self.statistic = statistic

    def __call__(self, seed_sequence) -> np.ndarray:
        replicate = resample(self.data, self.config, make_rng(seed_sequence))
        return np.asarray(self.statistic(replicate), dtype=float)


def bootstrap_statistic(data: DataMatrix, config: BootstrapConfig, statistic: Callable,
                        desc: str = 'bootstrap') -> np.ndarray:
    """b 个重复样本上的统计量，形状 (b,) + statistic 的形状"""
    task = _ReplicateStatistic(data, config, statistic)
    return np.stack(run_replicates(task, config.seed, config.b, n_jobs=config.n_jobs, desc=desc))


def jackknife_statistic(data: DataMatrix, statistic: Callable, n_jobs: int = 1) -> np.ndarray:
    """留一统计量，形状 (n,) + statistic 的形状"""
    return np.stack([
        np.asarray(value, dtype=float)
        for value in run_tasks(statistic, list(jackknife_samples(data)), n_jobs=n_jobs, desc='jackknife')
    ])
