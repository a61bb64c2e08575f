"""
联合分位概率与 Bonferroni 界
"""
from dataclasses import dataclass

import numpy as np
import pandas as pd

from mvn.services.correlation import as_correlation
from mvn.services.distribution import CdfAccuracy, normal_quantile, standard_mvn_cdf
from utils.exceptions import InvalidInputError

ADJUST_MODES = ('independent', 'bonferroni')


def _check_tau(tau: float, name: str = 'tau') -> float:
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise InvalidInputError(f'{name} 必须在 (0, 1) 内，当前 {tau}')
    return tau


@dataclass(frozen=True)
class ProbabilityBounds:
    lower: float
    upper: float
    independent_case: float

    def as_dict(self) -> dict:
        return {'lower': self.lower, 'upper': self.upper, 'independent_case': self.independent_case}


def joint_quantile_probability(tau_individual: float, corr, acc: CdfAccuracy = None) -> float:
    """
    各变量同时取各自 τ_i 分位数时的联合 CDF 值 F(Q(τ_i)·1; 0, C)。

    直接在等坐标点求 CDF，等价于对等坐标分位数函数求逆。
    """
    tau_individual = _check_tau(tau_individual, 'tau_individual')
    corr = as_correlation(corr)
    v = normal_quantile(tau_individual)
    return standard_mvn_cdf(np.full(corr.shape[0], v), corr, acc)


def bonferroni_bounds(tau_individual: float, q: int) -> ProbabilityBounds:
    tau_individual = _check_tau(tau_individual, 'tau_individual')
    q = int(q)
    if q < 1:
        raise InvalidInputError(f'变量个数至少为 1，当前 {q}')
    return ProbabilityBounds(
        lower=max(0.0, 1.0 - q * (1.0 - tau_individual)),
        upper=tau_individual,
        independent_case=tau_individual ** q,
    )


def adjusted_individual_tau(tau_joint: float, q: int, mode: str = 'independent') -> float:
    """为达到联合概率 τ_J，各变量需要的单变量分位概率"""
    tau_joint = _check_tau(tau_joint, 'tau_joint')
    q = int(q)
    if q < 1:
        raise InvalidInputError(f'变量个数至少为 1，当前 {q}')
    if mode == 'independent':
        return tau_joint ** (1.0 / q)
    if mode == 'bonferroni':
        return 1.0 - (1.0 - tau_joint) / q
    raise InvalidInputError(f'未知的调整方式: {mode}，可选 {ADJUST_MODES}')


def multiple_comparison_sweep(tau: float, q_max: int = 20) -> pd.DataFrame:
    """q = 1..q_max 时的概率界与调整后的单变量分位概率"""
    rows = []
    for q in range(1, int(q_max) + 1):
        bounds = bonferroni_bounds(tau, q)
        rows.append({
            'q': q,
            'bonferroni_lower': bounds.lower,
            'independent': bounds.independent_case,
            'upper': bounds.upper,
            'adjusted_independent': adjusted_individual_tau(tau, q, 'independent'),
            'adjusted_bonferroni': adjusted_individual_tau(tau, q, 'bonferroni'),
        })
    return pd.DataFrame(rows)
