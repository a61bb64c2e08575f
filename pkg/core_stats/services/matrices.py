"""
数据矩阵与多元正态模型

DataMatrix 按行存放观测（n×q），MvnModel 存放均值向量与协方差矩阵，
StandardizedData 是 Ψ(D) 的结果，同时保存逆变换所需的中心和尺度。
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from utils.exceptions import (
    DegenerateColumnError,
    InsufficientSamplesError,
    InvalidInputError,
    SingularMatrixError,
)

# 所有算法面向低维数据
MAX_VARIATES = 16

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
# 相关矩阵最小 Cholesky 主元平方的下限，低于它按奇异处理
RANK_RTOL = 1e-10


def _as_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise InvalidInputError(f'数据必须是二维矩阵，当前维度为 {arr.ndim}')
    return arr


@dataclass(frozen=True)
class DataMatrix:
    """多元观测矩阵，行是样本，列是变量"""
    values: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        arr = _as_matrix(self.values)
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise InvalidInputError('数据矩阵为空')
        if arr.shape[1] > MAX_VARIATES:
            raise InvalidInputError(f'变量个数 {arr.shape[1]} 超过上限 {MAX_VARIATES}')
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError('数据矩阵包含非有限值')
        arr.setflags(write=False)
        object.__setattr__(self, 'values', arr)
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != arr.shape[1]:
                raise InvalidInputError('列标签个数与变量个数不一致')
            object.__setattr__(self, 'labels', labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    def column_labels(self) -> tuple:
        if self.labels is not None:
            return self.labels
        return tuple(f'x{j + 1}' for j in range(self.q))

    def with_values(self, values) -> 'DataMatrix':
        return DataMatrix(values, labels=self.labels)


def _check_square_symmetric(cov: np.ndarray) -> None:
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InvalidInputError('协方差矩阵必须是方阵')
    scale = max(float(np.max(np.abs(cov))), np.finfo(float).tiny)
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
        raise InvalidInputError('协方差矩阵不对称')


def _check_psd(cov: np.ndarray) -> None:
    eigenvalues = np.linalg.eigvalsh(cov)
    top = max(float(eigenvalues[-1]), 0.0)
    if eigenvalues[0] < -PSD_RTOL * top:
        raise InvalidInputError(f'协方差矩阵不是半正定的（最小特征值 {eigenvalues[0]:.3g}）')


@dataclass(frozen=True)
class MvnModel:
    """
    多元正态模型 N(mean, cov)

    strict=False 只用于抽样（允许零方差分量），其余计算都要求对角线严格为正。
    """
    mean: np.ndarray
    cov: np.ndarray
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        mean = np.atleast_1d(np.array(self.mean, dtype=float))
        cov = np.atleast_2d(np.array(self.cov, dtype=float))
        if mean.ndim != 1:
            raise InvalidInputError('均值必须是向量')
        if cov.shape != (mean.size, mean.size):
            raise InvalidInputError(f'协方差维度 {cov.shape} 与均值长度 {mean.size} 不匹配')
        if mean.size > MAX_VARIATES:
            raise InvalidInputError(f'变量个数 {mean.size} 超过上限 {MAX_VARIATES}')
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidInputError('模型参数包含非有限值')
        _check_square_symmetric(cov)
        _check_psd(cov)
        if self.strict and np.any(np.diag(cov) <= 0):
            raise InvalidInputError('协方差矩阵对角线必须严格为正')
        cov = (cov + cov.T) / 2
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'cov', cov)

    @property
    def q(self) -> int:
        return self.mean.size

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    def correlation(self) -> np.ndarray:
        return correlation_from_cov(self.cov)

    @classmethod
    def from_correlation(cls, mean, corr, std) -> 'MvnModel':
        std = np.asarray(std, dtype=float)
        corr = np.asarray(corr, dtype=float)
        return cls(mean, corr * np.outer(std, std))

    @classmethod
    def standard(cls, q: int, rho: float = 0.0) -> 'MvnModel':
        """零均值、单位方差、等相关系数 rho 的标准模型"""
        corr = np.full((q, q), float(rho))
        np.fill_diagonal(corr, 1.0)
        return cls(np.zeros(q), corr)


@dataclass(frozen=True)
class StandardizedData:
    """Ψ(D)：逐列中心化并除以样本标准差"""
    values: np.ndarray
    centering: np.ndarray
    scaling: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    def as_data_matrix(self) -> DataMatrix:
        return DataMatrix(self.values)


def correlation_from_cov(cov) -> np.ndarray:
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    d = np.sqrt(np.diag(cov))
    if np.any(d <= 0):
        raise InvalidInputError('方差为零的变量无法计算相关矩阵')
    corr = cov / np.outer(d, d)
    corr = (corr + corr.T) / 2
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def _values(data) -> np.ndarray:
    if isinstance(data, (DataMatrix, StandardizedData)):
        return data.values
    return DataMatrix(data).values


def sample_mean(data) -> np.ndarray:
    """逐列算术平均"""
    return _values(data).mean(axis=0)


def sample_cov(data) -> np.ndarray:
    """无偏样本协方差（分母 n-1）"""
    values = _values(data)
    if values.shape[0] < 2:
        raise InsufficientSamplesError(f'计算样本协方差至少需要 2 个样本，当前 {values.shape[0]} 个')
    centered = values - values.mean(axis=0)
    cov = centered.T @ centered / (values.shape[0] - 1)
    return (cov + cov.T) / 2


def sample_std(data) -> np.ndarray:
    return np.sqrt(np.diag(sample_cov(data)))


def sample_corr(data) -> np.ndarray:
    return correlation_from_cov(sample_cov(data))


def fit_model(data) -> MvnModel:
    """用样本均值和样本协方差构造模型"""
    return MvnModel(sample_mean(data), sample_cov(data))


def standardize(data) -> StandardizedData:
    values = _values(data)
    centering = sample_mean(values)
    scaling = sample_std(values)
    for j, s in enumerate(scaling):
        if not s > 0:
            raise DegenerateColumnError(j)
    standardized = (values - centering) / scaling
    return StandardizedData(standardized, centering, scaling)


def destandardize(points, centering, scaling) -> np.ndarray:
    """标准化域的点映射回原始域：x·σ + μ"""
    centering = np.atleast_1d(np.asarray(centering, dtype=float))
    scaling = np.atleast_1d(np.asarray(scaling, dtype=float))
    if centering.shape != scaling.shape:
        raise InvalidInputError('中心向量与尺度向量长度不一致')
    if np.any(scaling <= 0):
        raise InvalidInputError('尺度必须严格为正')
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != centering.size:
        raise InvalidInputError(f'点的维度 {points.shape[-1]} 与变量个数 {centering.size} 不匹配')
    return points * scaling + centering


def cholesky_factor(cov) -> np.ndarray:
    """下三角 Cholesky 因子；非正定或数值上秩亏时抛 SingularMatrixError"""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    try:
        factor = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularMatrixError('协方差矩阵不是正定的') from exc
    # 相关矩阵的 Cholesky 主元，与各列量纲无关
    pivot = float(np.min(np.diag(factor) ** 2 / np.diag(cov)))
    if pivot <= RANK_RTOL:
        raise SingularMatrixError(f'协方差矩阵数值上秩亏（最小主元平方 {pivot:.3g}）')
    return factor


def is_positive_definite(cov) -> bool:
    try:
        cholesky_factor(cov)
    except SingularMatrixError:
        return False
    return True


def mahalanobis_sq_many(points, mean, cov) -> np.ndarray:
    """多个点的马氏距离平方"""
    factor = cholesky_factor(cov)
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    diff = np.atleast_2d(np.asarray(points, dtype=float)) - mean
    if diff.shape[1] != mean.size:
        raise InvalidInputError('点的维度与均值长度不匹配')
    z = linalg.solve_triangular(factor, diff.T, lower=True)
    return np.sum(z * z, axis=0)


def mahalanobis_sq(x, mean, cov) -> float:
    """(x−x̄) S⁻¹ (x−x̄)ᵀ"""
    return float(mahalanobis_sq_many(np.atleast_1d(x)[None, :], mean, cov)[0])


def mahalanobis_sq_all(data) -> np.ndarray:
    """每一行相对样本均值/样本协方差的马氏距离平方"""
    values = _values(data)
    return mahalanobis_sq_many(values, sample_mean(values), sample_cov(values))


