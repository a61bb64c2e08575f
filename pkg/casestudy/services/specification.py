"""
逐频率生成多轴环境规范
"""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from algorithms.services.critical_point_ci import algorithm3_critical_point_ci
from algorithms.services.joint_tau import algorithm1_joint_tau_uq
from bootstrap.services.config import BootstrapConfig, PercentileRequest
from bootstrap.services.parallel import run_tasks
from meshes.services.export import write_json
from mvn.services.distribution import CdfAccuracy
from normality.services.report import normality_report
from tolerance.services.limits import simultaneous_upper_tolerance, univariate_upper_tolerances
from utils.exceptions import QuantileError
from utils.rng import seed_to_int, spawn_seeds
from .ensemble import SrsEnsemble

logger = logging.getLogger(__name__)

ENVELOPE_MC = 2000


@dataclass(frozen=True)
class SpecificationLine:
    frequency: float
    labels: tuple
    critical_point_ci: Optional[np.ndarray] = None
    univariate_tolerance: Optional[np.ndarray] = None
    bonferroni_tolerance: Optional[np.ndarray] = None
    tau_joint: Optional[float] = None
    ad_p: Optional[float] = None
    ks_p: Optional[float] = None
    qq_pass: Optional[bool] = None
    normality_passed: Optional[bool] = None
    distances: Optional[np.ndarray] = field(default=None, repr=False)
    error: Optional[str] = None
    duration: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None

    def row(self) -> dict:
        """规范表的一行：每个轴三列（临界点、单变量、Bonferroni）"""
        values = {'frequency': self.frequency}
        for i, label in enumerate(self.labels):
            for name, vector in (('critical_point', self.critical_point_ci),
                                 ('univariate', self.univariate_tolerance),
                                 ('bonferroni', self.bonferroni_tolerance)):
                values[f'{label}_{name}'] = float(vector[i]) if vector is not None else math.nan
        values.update(tau_joint=self.tau_joint, ad_p=self.ad_p, ks_p=self.ks_p, qq_pass=self.qq_pass,
                      normality_passed=self.normality_passed, error=self.error or '')
        return values

    def as_dict(self) -> dict:
        values = self.row()
        values['distances'] = None if self.distances is None else [float(d) for d in self.distances]
        values['duration_seconds'] = round(self.duration, 3)
        return values


class _FrequencyJob:
    def __init__(self, tau: float, confidence: float, config: BootstrapConfig, acc: CdfAccuracy):
        self.tau = tau
        self.confidence = confidence
        self.config = config
        self.acc = acc

    def __call__(self, task) -> SpecificationLine:
        frequency, data, seed_sequence = task
        started = time.perf_counter()
        normal_seed, boot_seed = (seed_to_int(s) for s in seed_sequence.spawn(2))
        config = replace(self.config, seed=boot_seed, n_jobs=1)
        labels = data.column_labels()
        try:
            report = normality_report(data, n_mc=ENVELOPE_MC, seed=normal_seed)
            if not report.passed:
                logger.warning(f'{frequency} Hz: 正态性诊断未通过，结果仅供参考')
            ci = algorithm3_critical_point_ci(data, self.tau, PercentileRequest.of((self.confidence,)),
                                              config, self.acc)
            tau_joint = self.tau
            if data.q > 1:
                # 单变量分位数同时成立的概率，取单侧置信水平对应的值
                joint = algorithm1_joint_tau_uq(data, self.tau, PercentileRequest.of((1.0 - self.confidence,)),
                                                config, self.acc)
                tau_joint = joint.tau_values[0]
            return SpecificationLine(
                frequency=frequency,
                labels=labels,
                critical_point_ci=ci.point(self.confidence),
                univariate_tolerance=univariate_upper_tolerances(data, self.tau, self.confidence),
                bonferroni_tolerance=simultaneous_upper_tolerance(data, self.tau, self.confidence),
                tau_joint=float(tau_joint),
                ad_p=report.ad_p,
                ks_p=report.ks_p,
                qq_pass=report.qq_pass,
                normality_passed=report.passed,
                distances=report.distances,
                duration=time.perf_counter() - started,
            )
        except QuantileError as exc:
            logger.error(f'{frequency} Hz 计算失败: {exc}')
            return SpecificationLine(frequency=frequency, labels=labels, error=f'{type(exc).__name__}: {exc}',
                                     duration=time.perf_counter() - started)


def run_case_study(ensemble: SrsEnsemble, tau: float = 0.90, confidence: float = 0.95,
                   config: BootstrapConfig = None, acc: CdfAccuracy = None) -> list:
    """逐频率计算规范行；单个频率的失败只记录在该行"""
    config = config or BootstrapConfig.from_settings(ci_method='bca')
    acc = acc or CdfAccuracy.from_settings()
    seeds = spawn_seeds(config.seed, len(ensemble))
    tasks = [(f, m, s) for (f, m), s in zip(ensemble.items(), seeds)]
    lines = run_tasks(_FrequencyJob(tau, confidence, config, acc), tasks, n_jobs=config.n_jobs, desc='频率')
    failed = sum(not line.ok for line in lines)
    logger.info(f'案例研究完成：{len(lines)} 个频率，失败 {failed} 个')
    return lines


def specification_table(lines: list) -> pd.DataFrame:
    return pd.DataFrame([line.row() for line in lines])


def write_specification(lines: list, out_dir, stem: str = 'specification', manifest: dict = None) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table_path = out_dir / f'{stem}.csv'
    specification_table(lines).to_csv(table_path, index=False, float_format='%.4f')
    payload = dict(manifest or {}, lines=[line.as_dict() for line in lines])
    manifest_path = write_json(out_dir / f'{stem}_manifest.json', payload)
    return {'table': table_path, 'manifest': manifest_path}
