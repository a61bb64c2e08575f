"""
自助法置信区间

所有估计量都按"逐元素"处理：replicates 的第 0 维是重复样本，
其余维度可以是标量 ()、向量 (q,) 或网格 (n1, ..., nq)。
经验分位数统一用顺序统计量之间线性插值（type 7）。
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from utils.exceptions import InvalidInputError
from .config import MIN_B, PercentileRequest, normalize_ci_method

logger = logging.getLogger(__name__)

DIAGNOSTIC_CELLS = 64


@dataclass(frozen=True)
class IntervalResult:
    """values[i] 对应 request.gammas[i]"""
    gammas: tuple
    values: np.ndarray
    method: str
    fallback: bool = False
    fallback_cells: int = 0
    diagnostics: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {
            'gammas': list(self.gammas),
            'values': np.asarray(self.values).tolist(),
            'method': self.method,
            'fallback': self.fallback,
            'fallback_cells': self.fallback_cells,
        }


def _stack(replicates) -> np.ndarray:
    stack = np.asarray(replicates, dtype=float)
    if stack.ndim == 0:
        raise InvalidInputError('重复样本不能是标量')
    if not np.all(np.isfinite(stack)):
        raise InvalidInputError('重复样本包含非有限值')
    return stack


def percentile_ci(replicates, request: PercentileRequest) -> np.ndarray:
    """各 γ 的经验分位数，返回形状 (len(gammas),) + replicates.shape[1:]"""
    stack = _stack(replicates)
    if stack.shape[0] < MIN_B:
        raise InvalidInputError(f'重复次数至少为 {MIN_B}，当前 {stack.shape[0]}')
    return np.quantile(stack, request.gammas, axis=0, method='linear')


def acceleration(jackknife_values) -> np.ndarray:
    """由留一估计的偏度得到 BCa 加速常数 a"""
    jack = _stack(jackknife_values)
    diff = jack.mean(axis=0) - jack
    num = np.sum(diff ** 3, axis=0)
    den = 6.0 * np.sum(diff ** 2, axis=0) ** 1.5
    with np.errstate(invalid='ignore', divide='ignore'):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def bias_correction(replicates, theta_hat) -> np.ndarray:
    """z₀ = Φ⁻¹(#{θ* < θ̂} / b)，全部在一侧时为 ±inf"""
    stack = _stack(replicates)
    theta_hat = np.asarray(theta_hat, dtype=float)
    if theta_hat.shape != stack.shape[1:]:
        raise InvalidInputError(f'θ̂ 形状 {theta_hat.shape} 与重复样本 {stack.shape[1:]} 不一致')
    below = np.mean(stack < theta_hat, axis=0)
    with np.errstate(divide='ignore'):
        return ndtri(below)


def _sorted_quantile(sorted_stack: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """每个单元在各自水平 levels 上的 type 7 分位数"""
    b = sorted_stack.shape[0]
    position = np.clip(levels, 0.0, 1.0) * (b - 1)
    lower = np.floor(position).astype(np.int64)
    upper = np.minimum(lower + 1, b - 1)
    frac = position - lower
    lo_vals = np.take_along_axis(sorted_stack, lower[None], axis=0)[0]
    hi_vals = np.take_along_axis(sorted_stack, upper[None], axis=0)[0]
    return lo_vals + frac * (hi_vals - lo_vals)


def _diagnostics(z0: np.ndarray, accel: np.ndarray) -> dict:
    # 网格张量只记录汇总
    if z0.size <= DIAGNOSTIC_CELLS:
        return {'z0': z0.tolist(), 'acceleration': accel.tolist()}
    finite = z0[np.isfinite(z0)]
    return {
        'z0_mean': float(finite.mean()) if finite.size else None,
        'acceleration_max': float(np.max(np.abs(accel))),
    }


def adjusted_interval(replicates, request: PercentileRequest, z0, accel, method: str = 'bca') -> IntervalResult:
    """
    按 α' = Φ(z₀ + (z₀ + z_γ) / (1 − a(z₀ + z_γ))) 调整百分位。
    z₀ 无穷、重复样本全相同或 α' 无效的单元退回普通百分位，并在结果中标记。
    """
    stack = _stack(replicates)
    if stack.shape[0] < MIN_B:
        raise InvalidInputError(f'重复次数至少为 {MIN_B}，当前 {stack.shape[0]}')
    z0 = np.broadcast_to(np.asarray(z0, dtype=float), stack.shape[1:])
    accel = np.broadcast_to(np.asarray(accel, dtype=float), stack.shape[1:])
    sorted_stack = np.sort(stack, axis=0)
    bad = ~np.isfinite(z0) | (sorted_stack[0] == sorted_stack[-1])
    levels = []
    for gamma in request.gammas:
        with np.errstate(invalid='ignore', divide='ignore', over='ignore'):
            total = z0 + ndtri(gamma)
            denom = 1.0 - accel * total
            level = ndtr(z0 + total / denom)
        bad = bad | (denom <= 0) | ~np.isfinite(level)
        levels.append(level)
    values = [
        _sorted_quantile(sorted_stack, np.where(bad, gamma, level))
        for gamma, level in zip(request.gammas, levels)
    ]
    fallback_cells = int(np.count_nonzero(bad))
    if fallback_cells:
        logger.warning(f'{fallback_cells} 个单元的 z₀ 无穷或调整水平无效，退回百分位区间')
    return IntervalResult(
        gammas=request.gammas,
        values=np.stack(values),
        method=method,
        fallback=fallback_cells > 0,
        fallback_cells=fallback_cells,
        diagnostics=_diagnostics(z0, accel),
    )


def bca_ci(replicates, theta_hat, jackknife_values, request: PercentileRequest) -> IntervalResult:
    return adjusted_interval(replicates, request, bias_correction(replicates, theta_hat),
                             acceleration(jackknife_values), method='bca')


def bias_corrected_ci(replicates, theta_hat, request: PercentileRequest) -> IntervalResult:
    """a = 0 的 BCa"""
    return adjusted_interval(replicates, request, bias_correction(replicates, theta_hat), 0.0,
                             method='bias_corrected')


def confidence_interval(replicates, request: PercentileRequest, method: str = 'percentile',
                        theta_hat=None, jackknife_values: Optional[np.ndarray] = None) -> IntervalResult:
    """按方法名分派"""
    method = normalize_ci_method(method)
    if method == 'percentile':
        return IntervalResult(request.gammas, percentile_ci(replicates, request), 'percentile')
    if theta_hat is None:
        raise InvalidInputError(f'{method} 需要原样本估计值 θ̂')
    if method == 'bias_corrected':
        return bias_corrected_ci(replicates, theta_hat, request)
    if jackknife_values is None:
        raise InvalidInputError('BCa 需要留一估计值')
    return bca_ci(replicates, theta_hat, jackknife_values, request)


def tensor_percentile(stack, request: PercentileRequest, probabilities: bool = True) -> list:
    """沿重复样本维逐单元取分位数，返回每个 γ 一张网格"""
    if isinstance(stack, (list, tuple)):
        shapes = {np.shape(g) for g in stack}
        if len(shapes) != 1:
            raise InvalidInputError(f'网格形状不一致: {sorted(shapes)}')
    stack = np.asarray(stack, dtype=float)
    if stack.ndim < 2:
        raise InvalidInputError('网格张量至少是二维 (b, n1, ...)')
    grids = np.quantile(stack, request.gammas, axis=0, method='linear')
    if probabilities:
        grids = np.clip(grids, 0.0, 1.0)
    return [grids[i] for i in range(len(request))]
