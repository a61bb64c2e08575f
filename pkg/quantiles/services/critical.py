"""
等坐标分位数与临界点

标准化域中 Q(τ) 上密度最大的点位于对角线 x₁=…=x_q，
即等坐标分位数 v 满足 F(v·1; 0, C) = τ，再经 v·σ + μ 映射到任意域。
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from core_stats.services.matrices import MvnModel, cholesky_factor
from mvn.services.correlation import as_correlation
from mvn.services.distribution import CdfAccuracy, normal_quantile, standard_mvn_cdf
from utils.exceptions import InvalidInputError, NumericalError

ROOT_XTOL = 1e-7
ROOT_MAXITER = 5000
BRACKET_PAD = 1e-3
BRACKET_LIMIT = 40.0


@dataclass(frozen=True)
class CriticalPoint:
    point: np.ndarray
    tau: float
    equicoordinate_value: float

    def as_dict(self) -> dict:
        return {
            'point': [float(v) for v in self.point],
            'tau': self.tau,
            'equicoordinate_value': self.equicoordinate_value,
        }


def equicoordinate_quantile(tau: float, corr, acc: CdfAccuracy = None) -> float:
    """求 v 使 F(v·1; 0, C) = τ"""
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise InvalidInputError(f'分位概率必须在 (0, 1) 内，当前 {tau}')
    corr = as_correlation(corr)
    q = corr.shape[0]
    if q == 1:
        return normal_quantile(tau)
    acc = acc or CdfAccuracy()

    def g(v: float) -> float:
        return standard_mvn_cdf(np.full(q, v), corr, acc) - tau

    # Φ(v) ≥ F(v·1) ≥ 1 - q(1-Φ(v)) 给出初始区间
    lo = normal_quantile(tau) - BRACKET_PAD
    hi = normal_quantile(1.0 - (1.0 - tau) / q) + BRACKET_PAD
    g_lo, g_hi = g(lo), g(hi)
    while g_lo > 0 and lo > -BRACKET_LIMIT:
        lo -= 1.0
        g_lo = g(lo)
    while g_hi < 0 and hi < BRACKET_LIMIT:
        hi += 1.0
        g_hi = g(hi)
    if g_lo > 0 or g_hi < 0:
        raise NumericalError(f'等坐标分位数求根区间无效：g({lo})={g_lo:.3g}, g({hi})={g_hi:.3g}')
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    try:
        return float(brentq(g, lo, hi, xtol=ROOT_XTOL, maxiter=ROOT_MAXITER))
    except RuntimeError as exc:
        raise NumericalError(f'等坐标分位数求根未收敛: {exc}') from exc


def critical_point(tau: float, model: MvnModel, acc: CdfAccuracy = None) -> CriticalPoint:
    """已知参数模型的临界点 v(τ)"""
    cholesky_factor(model.cov)
    v = equicoordinate_quantile(tau, model.correlation(), acc)
    point = np.full(model.q, v) * model.std + model.mean
    return CriticalPoint(point=point, tau=float(tau), equicoordinate_value=v)
