"""
多元正态分布：密度、CDF、分位数函数与抽样

CDF 的求值路径：
- q=1：误差函数（scipy.special.ndtr）
- q=2：向量化的 Drezner-Wesolowsky/Genz 算法（bivariate.py）
- q=3：以相关性最弱的变量为条件，对二元 CDF 做分段 Gauss-Legendre 一维积分，逐次加倍分段直到收敛
- q≥4：Genz 变量分离 + 随机化 Sobol 拟蒙特卡洛，按积分上限排序变量后做 Cholesky 分解
相关矩阵为对角阵时直接按一维 CDF 连乘。
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from django.conf import settings
from scipy import linalg
from scipy.special import ndtr, ndtri
from scipy.stats import qmc

from core_stats.services.matrices import (
    DataMatrix,
    MvnModel,
    cholesky_factor,
    correlation_from_cov,
)
from utils.exceptions import AccuracyNotMetError, InvalidInputError
from utils.rng import make_rng, spawn_seeds
from .bivariate import LIMIT, bvn_cdf

logger = logging.getLogger(__name__)

# 条件积分的截断区间，Φ(-9) ≈ 1e-19
T_LOW = -9.0
T_HIGH = 9.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_GL5_X, _GL5_W = np.polynomial.legendre.leggauss(5)
MIN_PANELS = 16
MAX_PANELS = 1024
# 网格累积积分时每个子区间的最大宽度
TENSOR_PANEL = 0.1
QMC_SHIFTS = 8
QMC_START = 1024
LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@dataclass(frozen=True)
class CdfAccuracy:
    """CDF 积分精度参数"""
    abs_tol: float = 1e-6
    max_evals: int = 10_000_000
    rng_seed: int = 0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise InvalidInputError('abs_tol 必须大于 0')
        if not self.max_evals > 0:
            raise InvalidInputError('max_evals 必须大于 0')

    @classmethod
    def from_settings(cls, **overrides) -> 'CdfAccuracy':
        conf = getattr(settings, 'QUANTILE', {})
        values = {
            'abs_tol': conf.get('CDF_ABS_TOL', cls.abs_tol),
            'max_evals': conf.get('CDF_MAX_EVALS', cls.max_evals),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def normal_quantile(tau: float) -> float:
    """标准正态分位数函数 Φ⁻¹(τ)"""
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise InvalidInputError(f'分位概率必须在 (0, 1) 内，当前 {tau}')
    return float(ndtri(tau))


def mvn_logpdf(x, model: MvnModel) -> np.ndarray:
    factor = cholesky_factor(model.cov)
    x = np.asarray(x, dtype=float)
    diff = np.atleast_2d(x) - model.mean
    if diff.shape[-1] != model.q:
        raise InvalidInputError(f'点的维度 {diff.shape[-1]} 与模型维度 {model.q} 不匹配')
    z = linalg.solve_triangular(factor, diff.T, lower=True)
    log_det = np.sum(np.log(np.diag(factor)))
    return -0.5 * np.sum(z * z, axis=0) - log_det - model.q * LOG_SQRT_2PI


def mvn_pdf(x, model: MvnModel):
    """概率密度；x 为单个点时返回标量，为点集 (m, q) 时返回长度 m 的数组"""
    values = np.exp(mvn_logpdf(x, model))
    if np.asarray(x).ndim <= 1:
        return float(values[0])
    return values


def _standardized_limits(x, model: MvnModel) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.q:
        raise InvalidInputError(f'点的维度 {x.shape[-1]} 与模型维度 {model.q} 不匹配')
    if np.any(np.isnan(x)):
        raise InvalidInputError('CDF 积分上限包含 NaN')
    with np.errstate(invalid='ignore'):
        h = (x - model.mean) / model.std
    return np.clip(h, -LIMIT, LIMIT)


def _is_diagonal(corr: np.ndarray) -> bool:
    return not np.any(corr - np.eye(corr.shape[0]))


# ---------------------------------------------------------------- 三元：条件积分

@dataclass(frozen=True)
class _TrivariateSetup:
    order: tuple
    r1: float
    r2: float
    s1: float
    s2: float
    rho: float


def _trivariate_setup(corr: np.ndarray) -> _TrivariateSetup:
    off = np.abs(corr - np.eye(3))
    c = int(np.argmin(off.max(axis=1)))
    a, b = [i for i in range(3) if i != c]
    r1, r2, r12 = corr[c, a], corr[c, b], corr[a, b]
    s1 = math.sqrt(max(1.0 - r1 * r1, 0.0))
    s2 = math.sqrt(max(1.0 - r2 * r2, 0.0))
    if s1 <= 0 or s2 <= 0:
        raise InvalidInputError('相关系数为 ±1 的退化模型无法计算三元 CDF')
    rho = float(np.clip((r12 - r1 * r2) / (s1 * s2), -1.0, 1.0))
    return _TrivariateSetup((c, a, b), float(r1), float(r2), s1, s2, rho)


def _trivariate_panels(h: np.ndarray, setup: _TrivariateSetup, panels: int) -> np.ndarray:
    """h: (m, 3) 已按 setup.order 重排的标准化上限"""
    upper = np.clip(h[:, 0], T_LOW, T_HIGH)
    width = (upper - T_LOW) / panels
    # 每个点 panels × 10 个积分节点
    offsets = (np.arange(panels)[:, None] + (_GL_X[None, :] + 1) / 2).ravel()
    weights = np.tile(_GL_W / 2, panels)
    t = T_LOW + width[:, None] * offsets[None, :]
    inner = bvn_cdf(
        (h[:, 1:2] - setup.r1 * t) / setup.s1,
        (h[:, 2:3] - setup.r2 * t) / setup.s2,
        setup.rho,
    )
    density = np.exp(-0.5 * t * t - LOG_SQRT_2PI)
    return width * np.sum(weights * density * inner, axis=1)


def _trivariate_cdf(h: np.ndarray, corr: np.ndarray, acc: CdfAccuracy, chunk: int = 4096) -> np.ndarray:
    setup = _trivariate_setup(corr)
    h = np.atleast_2d(h)[:, list(setup.order)]
    out = np.empty(h.shape[0])
    for start in range(0, h.shape[0], chunk):
        block = h[start:start + chunk]
        panels = MIN_PANELS
        previous = _trivariate_panels(block, setup, panels)
        while True:
            panels *= 2
            current = _trivariate_panels(block, setup, panels)
            error = float(np.max(np.abs(current - previous)))
            if error <= acc.abs_tol:
                break
            if panels >= MAX_PANELS or panels * 10 > acc.max_evals:
                raise AccuracyNotMetError(float(current[0]), error)
            previous = current
        out[start:start + chunk] = current
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------- q ≥ 4：拟蒙特卡洛

def _sov_integrand(w: np.ndarray, b: np.ndarray, factor: np.ndarray) -> np.ndarray:
    """Genz 变量分离后的被积函数，w 是 [0,1)^(q-1) 中的点"""
    n, q = w.shape[0], b.size
    y = np.zeros((n, q - 1))
    e = np.full(n, ndtr(b[0] / factor[0, 0]))
    f = e.copy()
    tiny = np.finfo(float).tiny
    for i in range(1, q):
        y[:, i - 1] = ndtri(np.clip(w[:, i - 1] * e, tiny, 1.0 - 1e-16))
        e = ndtr((b[i] - y[:, :i] @ factor[i, :i]) / factor[i, i])
        f = f * e
    return f


def _qmc_cdf(h: np.ndarray, corr: np.ndarray, acc: CdfAccuracy) -> float:
    order = np.argsort(h)
    b = h[order]
    factor = cholesky_factor(corr[np.ix_(order, order)])
    q = b.size
    engines = [
        qmc.Sobol(d=q - 1, scramble=True, rng=make_rng(ss))
        for ss in spawn_seeds(acc.rng_seed, QMC_SHIFTS)
    ]
    sums = np.zeros(QMC_SHIFTS)
    count = 0
    batch = QMC_START
    while True:
        for m, engine in enumerate(engines):
            sums[m] += np.sum(_sov_integrand(engine.random(batch), b, factor))
        count += batch
        estimates = sums / count
        mean = float(np.mean(estimates))
        error = 3.0 * float(np.std(estimates, ddof=1)) / math.sqrt(QMC_SHIFTS)
        if error <= acc.abs_tol:
            return float(np.clip(mean, 0.0, 1.0))
        if count * QMC_SHIFTS * 2 > acc.max_evals:
            raise AccuracyNotMetError(mean, error)
        batch = count


# ---------------------------------------------------------------- 对外接口

def _standard_cdf(h: np.ndarray, corr: np.ndarray, acc: CdfAccuracy) -> np.ndarray:
    """标准化上限 h (m, q) 与相关矩阵下的 CDF"""
    q = corr.shape[0]
    if q == 1 or _is_diagonal(corr):
        return np.prod(ndtr(h), axis=1)
    if q == 2:
        return bvn_cdf(h[:, 0], h[:, 1], corr[0, 1])
    if q == 3:
        return _trivariate_cdf(h, corr, acc)
    return np.array([_qmc_cdf(row, corr, acc) for row in h])


def _check_cdf_model(model: MvnModel) -> None:
    # q ≤ 2 时 |ρ| = 1 的 CDF 仍有定义；q ≥ 3 的条件分解要求正定
    if model.q >= 3:
        cholesky_factor(model.cov)


def mvn_cdf(x, model: MvnModel, acc: CdfAccuracy = None) -> float:
    """P(X ≤ x)，逐分量比较"""
    acc = acc or CdfAccuracy()
    _check_cdf_model(model)
    h = _standardized_limits(np.atleast_1d(x), model)
    return float(_standard_cdf(h[None, :], model.correlation(), acc)[0])


def mvn_cdf_many(points, model: MvnModel, acc: CdfAccuracy = None) -> np.ndarray:
    """点集 (m, q) 上的 CDF"""
    acc = acc or CdfAccuracy()
    _check_cdf_model(model)
    h = _standardized_limits(np.atleast_2d(points), model)
    return _standard_cdf(h, model.correlation(), acc)


def standard_mvn_cdf(h, corr, acc: CdfAccuracy = None) -> float:
    """零均值、相关矩阵 corr 的 CDF 在 h 处的值"""
    acc = acc or CdfAccuracy()
    corr = np.atleast_2d(np.asarray(corr, dtype=float))
    h = np.clip(np.atleast_1d(np.asarray(h, dtype=float)), -LIMIT, LIMIT)
    return float(_standard_cdf(h[None, :], corr, acc)[0])


def _tensor_trivariate(h_axes, corr: np.ndarray) -> np.ndarray:
    setup = _trivariate_setup(corr)
    c, a, b = setup.order
    hc = np.clip(h_axes[c], T_LOW, T_HIGH)
    ha, hb = h_axes[a][:, None], h_axes[b][None, :]
    running = np.zeros((ha.shape[0], hb.shape[1]))
    slabs = np.empty((hc.size, ha.shape[0], hb.shape[1]))
    left = T_LOW
    for i, right in enumerate(hc):
        gap = right - left
        if gap > 0:
            pieces = max(1, math.ceil(gap / TENSOR_PANEL))
            width = gap / pieces
            for p in range(pieces):
                t_nodes = left + width * (p + (_GL5_X + 1) / 2)
                for t, w in zip(t_nodes, _GL5_W):
                    inner = bvn_cdf((ha - setup.r1 * t) / setup.s1, (hb - setup.r2 * t) / setup.s2, setup.rho)
                    running += (w * width / 2) * math.exp(-0.5 * t * t - LOG_SQRT_2PI) * inner
            left = right
        slabs[i] = running
    # slabs 的轴顺序是 (c, a, b)，转回 (0, 1, 2)
    return np.clip(np.transpose(slabs, np.argsort(setup.order)), 0.0, 1.0)


def mvn_cdf_tensor(axes: Sequence[np.ndarray], model: MvnModel) -> np.ndarray:
    """
    张量网格上的 CDF：axes[i] 是第 i 个变量的升序坐标，
    返回形状为 (len(axes[0]), ..., len(axes[q-1])) 的数组。
    """
    if len(axes) != model.q:
        raise InvalidInputError(f'网格轴数 {len(axes)} 与模型维度 {model.q} 不匹配')
    if model.q > 3:
        raise InvalidInputError('网格 CDF 只支持 q ≤ 3')
    _check_cdf_model(model)
    std = model.std
    h_axes = [
        np.clip((np.asarray(axis, dtype=float) - model.mean[i]) / std[i], -LIMIT, LIMIT)
        for i, axis in enumerate(axes)
    ]
    corr = correlation_from_cov(model.cov)
    if model.q == 1 or _is_diagonal(corr):
        result = ndtr(h_axes[0])
        for h in h_axes[1:]:
            result = np.multiply.outer(result, ndtr(h))
        return result
    if model.q == 2:
        return bvn_cdf(h_axes[0][:, None], h_axes[1][None, :], corr[0, 1])
    return _tensor_trivariate(h_axes, corr)


# ---------------------------------------------------------------- 抽样

def sampling_factor(cov) -> np.ndarray:
    """抽样用的矩阵平方根：Cholesky，失败时加一次对角抖动，仍失败则用特征分解"""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    q = cov.shape[0]
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        pass
    jitter = 1e-12 * float(np.trace(cov)) / q
    if jitter > 0:
        try:
            factor = linalg.cholesky(cov + jitter * np.eye(q), lower=True)
            logger.warning(f'协方差矩阵接近奇异，抽样时对角线加抖动 {jitter:.3g}')
            return factor
        except linalg.LinAlgError:
            pass
    eigenvalues, vectors = np.linalg.eigh(cov)
    logger.warning('协方差矩阵奇异，抽样改用特征分解平方根')
    return vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def mvn_sample(model: MvnModel, n: int, seed=None) -> DataMatrix:
    """从 N(mean, cov) 抽取 n 行"""
    n = int(n)
    if n <= 0:
        raise InvalidInputError(f'样本量必须为正，当前 {n}')
    rng = make_rng(seed)
    factor = sampling_factor(model.cov)
    z = rng.standard_normal((n, model.q))
    return DataMatrix(model.mean + z @ factor.T)
