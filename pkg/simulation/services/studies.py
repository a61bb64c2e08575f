"""
三个算法的覆盖率验证研究

每个参数单元独立派生种子，单元内的 mc_trials 次试验并行执行；
相同 StudyConfig（含 seed）得到相同结果表。
"""
import logging
import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.special import ndtri

from algorithms.services.critical_point_ci import algorithm3_critical_point_ci
from algorithms.services.joint_tau import algorithm1_joint_tau_uq
from algorithms.services.quantile_ci import algorithm2_quantile_ci
from bootstrap.services.config import PercentileRequest
from bootstrap.services.parallel import run_tasks
from core_stats.services.matrices import MvnModel
from meshes.services.grid import GridSpec
from mvn.services.correlation import cvine_random_correlation
from mvn.services.distribution import CdfAccuracy, mvn_cdf, mvn_sample
from quantiles.services.coverage import ModelQuantileRegion, draw_coverage_samples, estimate_coverage_beta
from quantiles.services.probability import joint_quantile_probability
from simulation.services.config import StudyConfig
from utils.exceptions import InvalidInputError
from utils.rng import make_rng, seed_to_int, spawn_seeds

logger = logging.getLogger(__name__)

NOMINAL_CONFIDENCE = 0.95
BAND_CONFIDENCE = 0.99
# 仅用于 q ≥ 4 的随机化 Sobol 积分
HIGH_DIM_Q = 4
MEAN_RANGE = (0.0, 100.0)


@dataclass
class StudyResult:
    config: StudyConfig
    table: pd.DataFrame
    cell_seeds: list = field(default_factory=list)
    durations: list = field(default_factory=list)

    @property
    def grand_mean(self) -> float:
        return float(self.table['p'].mean())

    def manifest(self) -> dict:
        return {
            'study': self.config.study,
            'config': self.config.as_dict(),
            'cell_seeds': list(self.cell_seeds),
            'cell_durations_seconds': [round(d, 3) for d in self.durations],
            'grand_mean_p': self.grand_mean,
        }


def wilson_band(p0: float, trials: int, confidence: float = BAND_CONFIDENCE) -> tuple:
    """名义覆盖率 p0 在 trials 次试验下的 Wilson 得分区间"""
    if trials <= 0:
        return 0.0, 1.0
    z = float(ndtri(0.5 + confidence / 2))
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p0 + z2 / (2.0 * trials)) / denom
    margin = z * np.sqrt(p0 * (1.0 - p0) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - margin), min(1.0, center + margin)


def _accuracy(config: StudyConfig, q: int) -> CdfAccuracy:
    if q >= HIGH_DIM_Q:
        return CdfAccuracy.from_settings(abs_tol=config.cdf_abs_tol)
    return CdfAccuracy.from_settings()


def _trial_seeds(seed_sequence) -> tuple:
    data_seed, boot_seed = seed_sequence.spawn(2)
    return data_seed, seed_to_int(boot_seed)


class _Alg1Trial:
    def __init__(self, config: StudyConfig, q: int, n: int, tau_individual: float):
        self.config = config
        self.q = q
        self.n = n
        self.tau_individual = tau_individual
        self.request = PercentileRequest.of(config.gammas)
        self.acc = _accuracy(config, q)

    def __call__(self, seed_sequence) -> bool:
        data_seed, boot_seed = _trial_seeds(seed_sequence)
        rng = make_rng(seed_to_int(data_seed))
        corr = cvine_random_correlation(self.q, self.config.cvine_c, seed=rng.integers(2 ** 62))
        # μ = 1_q·U(0, 100)
        mean = np.full(self.q, rng.uniform(*MEAN_RANGE))
        model = MvnModel(mean, corr.values)
        data = mvn_sample(model, self.n, seed=rng.integers(2 ** 62))
        truth = joint_quantile_probability(self.tau_individual, corr.values, self.acc)
        interval = algorithm1_joint_tau_uq(data, self.tau_individual, self.request,
                                           self.config.trial_bootstrap(boot_seed), self.acc)
        lower, upper = min(interval.tau_values), max(interval.tau_values)
        return bool(lower <= truth <= upper)


class _Alg2Trial:
    def __init__(self, config: StudyConfig, model: MvnModel, tau: float, n: int, beta_truth: float,
                 samples: np.ndarray):
        self.config = config
        self.model = model
        self.tau = tau
        self.n = n
        self.beta_truth = beta_truth
        self.samples = samples
        self.gamma = config.gammas[-1]
        self.grid = GridSpec(q=2, step=config.grid_step)

    def __call__(self, seed_sequence) -> bool:
        data_seed, boot_seed = _trial_seeds(seed_sequence)
        data = mvn_sample(self.model, self.n, seed=seed_to_int(data_seed))
        result = algorithm2_quantile_ci(data, self.tau, PercentileRequest.of((self.gamma,)),
                                        self.config.trial_bootstrap(boot_seed), grid=self.grid,
                                        interpolate=self.config.interpolate)
        beta = estimate_coverage_beta(result.region(self.gamma), self.model, samples=self.samples).beta
        return bool(beta >= self.beta_truth)


class _Alg3Trial:
    def __init__(self, config: StudyConfig, q: int, n: int, tau: float):
        self.config = config
        self.q = q
        self.n = n
        self.tau = tau
        self.gamma = config.gammas[-1]
        self.acc = _accuracy(config, q)

    def __call__(self, seed_sequence) -> bool:
        data_seed, boot_seed = _trial_seeds(seed_sequence)
        rng = make_rng(seed_to_int(data_seed))
        corr = cvine_random_correlation(self.q, self.config.cvine_c, seed=rng.integers(2 ** 62))
        model = MvnModel(np.zeros(self.q), corr.values)
        data = mvn_sample(model, self.n, seed=rng.integers(2 ** 62))
        ci = algorithm3_critical_point_ci(data, self.tau, PercentileRequest.of((self.gamma,)),
                                          self.config.trial_bootstrap(boot_seed), self.acc)
        return bool(mvn_cdf(ci.point(self.gamma), model, self.acc) >= self.tau)


def _run_cells(config: StudyConfig, cells: list, make_trial, columns: list) -> StudyResult:
    """cells: 参数字典列表；make_trial(cell) 返回可序列化的单次试验"""
    cell_seeds = spawn_seeds(config.seed, len(cells))
    low, high = wilson_band(NOMINAL_CONFIDENCE, config.mc_trials)
    rows, durations = [], []
    for cell, cell_seed in zip(cells, cell_seeds):
        started = time.perf_counter()
        trial = make_trial(cell, cell_seed)
        outcomes = run_tasks(trial, cell_seed.spawn(config.mc_trials), n_jobs=config.n_jobs,
                             desc=f'{config.study} {cell}')
        p = float(np.mean(outcomes))
        durations.append(time.perf_counter() - started)
        rows.append(dict(cell, p=p, trials=config.mc_trials, band_low=low, band_high=high,
                         in_band=bool(low <= p <= high)))
        logger.info(f'{config.study} 单元 {cell}: p={p:.3f}（{config.mc_trials} 次试验，用时 {durations[-1]:.1f}s）')
    table = pd.DataFrame(rows, columns=columns + ['p', 'trials', 'band_low', 'band_high', 'in_band'])
    return StudyResult(config=config, table=table, cell_seeds=[seed_to_int(s) for s in cell_seeds],
                       durations=durations)


def _require(config: StudyConfig, study: str) -> None:
    if config.study != study:
        raise InvalidInputError(f'配置的研究类型为 {config.study}，需要 {study}')


def run_study_alg1(config: StudyConfig) -> StudyResult:
    """联合分位概率区间的包含率：表列 (q, n, p)"""
    _require(config, 'alg1')
    if len(config.gammas) < 2:
        raise InvalidInputError('alg1 需要双侧 γ，例如 (0.025, 0.975)')
    if len(config.tau_list) != 1:
        raise InvalidInputError(f'alg1 的表按 (q, n) 分组，只接受一个 τ_i，当前 {config.tau_list}')
    tau_individual = config.tau_list[0]
    cells = [{'q': int(q), 'n': int(n)} for q in config.q_list for n in config.n_list]
    return _run_cells(config, cells,
                      lambda cell, _: _Alg1Trial(config, cell['q'], cell['n'], tau_individual),
                      ['q', 'n'])


def run_study_alg2(config: StudyConfig) -> StudyResult:
    """二维分位数上置信集合的覆盖率：表列 (rho, tau, n, p)"""
    _require(config, 'alg2')
    cells = [{'rho': float(rho), 'tau': float(tau), 'n': int(n)}
             for rho in config.rho_list for tau in config.tau_list for n in config.n_list]
    shared = {}

    def make_trial(cell, cell_seed):
        model = MvnModel.standard(2, cell['rho'])
        if cell['rho'] not in shared:
            # 同一 ρ 下所有试验共用同一批总体样本
            shared[cell['rho']] = draw_coverage_samples(model, config.n_mc_beta, seed=seed_to_int(cell_seed))
        samples = shared[cell['rho']]
        truth = estimate_coverage_beta(ModelQuantileRegion(model, cell['tau']), model, samples=samples).beta
        logger.debug(f'ρ={cell["rho"]}, τ={cell["tau"]}: 真实 β̂={truth:.4f}')
        return _Alg2Trial(config, model, cell['tau'], cell['n'], truth, samples)

    return _run_cells(config, cells, make_trial, ['rho', 'tau', 'n'])


def run_study_alg3(config: StudyConfig) -> StudyResult:
    """临界点上置信限的 CDF 超越率：表列 (q, n, tau, p)"""
    _require(config, 'alg3')
    cells = [{'q': int(q), 'n': int(n), 'tau': float(tau)}
             for q in config.q_list for n in config.n_list for tau in config.tau_list]
    return _run_cells(config, cells,
                      lambda cell, _: _Alg3Trial(config, cell['q'], cell['n'], cell['tau']),
                      ['q', 'n', 'tau'])


RUNNERS = {'alg1': run_study_alg1, 'alg2': run_study_alg2, 'alg3': run_study_alg3}


def run_study(config: StudyConfig) -> StudyResult:
    return RUNNERS[config.study](config)
