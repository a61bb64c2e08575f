"""
C-vine 随机相关矩阵

Lewandowski-Kurowicka-Joe 构造：第 k 层树的偏相关系数取自 (-1, 1) 上
形状参数为 c + (q-1-k)/2 的对称 beta 分布，再沿 C-vine 递推为相关系数。
c 越大，相关系数越集中在 0 附近。
"""
from dataclasses import dataclass

import numpy as np

from utils.exceptions import InvalidInputError
from utils.rng import make_rng

UNIT_DIAGONAL_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationMatrix:
    values: np.ndarray

    def __post_init__(self):
        values = np.atleast_2d(np.array(self.values, dtype=float))
        q = values.shape[0]
        if values.shape != (q, q):
            raise InvalidInputError('相关矩阵必须是方阵')
        if np.max(np.abs(np.diag(values) - 1.0)) > UNIT_DIAGONAL_TOL:
            raise InvalidInputError('相关矩阵对角线必须为 1')
        if np.max(np.abs(values - values.T)) > UNIT_DIAGONAL_TOL:
            raise InvalidInputError('相关矩阵不对称')
        if np.any(np.abs(values) > 1.0 + UNIT_DIAGONAL_TOL):
            raise InvalidInputError('相关系数必须在 [-1, 1] 内')
        eigenvalues = np.linalg.eigvalsh(values)
        if eigenvalues[0] < -1e-10 * eigenvalues[-1]:
            raise InvalidInputError('相关矩阵不是半正定的')
        values = (values + values.T) / 2
        np.fill_diagonal(values, 1.0)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def q(self) -> int:
        return self.values.shape[0]

    @classmethod
    def equicorrelated(cls, q: int, rho: float) -> 'CorrelationMatrix':
        values = np.full((q, q), float(rho))
        np.fill_diagonal(values, 1.0)
        return cls(values)


def as_correlation(corr) -> np.ndarray:
    """接受 CorrelationMatrix、数组或二元情形下的单个 ρ"""
    if isinstance(corr, CorrelationMatrix):
        return corr.values
    arr = np.asarray(corr, dtype=float)
    if arr.ndim == 0:
        return CorrelationMatrix.equicorrelated(2, float(arr)).values
    return CorrelationMatrix(arr).values


def cvine_random_correlation(q: int, c: float, seed=None) -> CorrelationMatrix:
    """按 C-vine 方法随机生成 q×q 相关矩阵"""
    q = int(q)
    c = float(c)
    if q < 2:
        raise InvalidInputError(f'变量个数至少为 2，当前 {q}')
    if not c > 0:
        raise InvalidInputError(f'集中参数 c 必须大于 0，当前 {c}')
    rng = make_rng(seed)
    partial = np.zeros((q, q))
    corr = np.eye(q)
    for k in range(q - 1):
        shape = c + (q - 1 - k) / 2
        for i in range(k + 1, q):
            partial[k, i] = 2.0 * rng.beta(shape, shape) - 1.0
            p = partial[k, i]
            # 由偏相关逐层还原为相关系数
            for level in range(k - 1, -1, -1):
                p = p * np.sqrt((1 - partial[level, i] ** 2) * (1 - partial[level, k] ** 2)) \
                    + partial[level, i] * partial[level, k]
            corr[k, i] = corr[i, k] = p
    return CorrelationMatrix(corr)
