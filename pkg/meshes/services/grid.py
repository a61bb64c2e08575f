"""
张量网格与 CDF 网格
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings
from scipy.interpolate import RegularGridInterpolator
from scipy.special import ndtr

from core_stats.services.matrices import MvnModel
from mvn.services.distribution import mvn_cdf_tensor
from utils.exceptions import InvalidInputError, ResourceError

logger = logging.getLogger(__name__)

DEFAULT_STEPS = {2: 0.01, 3: 0.1}
DOMAIN_BOUND = 4.0
NODE_COUNT_TOL = 1e-9


def max_grid_cells() -> int:
    return int(getattr(settings, 'QUANTILE', {}).get('MAX_GRID_CELLS', 2 ** 31))


def check_grid_cells(cells: int, cap: Optional[int] = None, what: str = '网格') -> None:
    """分配前检查张量单元数"""
    cap = cap or max_grid_cells()
    if cells > cap:
        raise ResourceError(f'{what}需要 {cells} 个单元，超过上限 {cap}')


@dataclass(frozen=True)
class GridSpec:
    """标准化域上的等距网格 [lo, hi]^q"""
    q: int
    lo: float = -DOMAIN_BOUND
    hi: float = DOMAIN_BOUND
    step: Optional[float] = None

    def __post_init__(self):
        if self.q not in DEFAULT_STEPS:
            raise InvalidInputError(f'网格只支持 q ∈ {{2, 3}}，当前 {self.q}')
        step = DEFAULT_STEPS[self.q] if self.step is None else float(self.step)
        object.__setattr__(self, 'step', step)
        if not self.lo < self.hi:
            raise InvalidInputError('网格下界必须小于上界')
        if not step > 0:
            raise InvalidInputError('网格步长必须大于 0')
        if self.lo > -DOMAIN_BOUND or self.hi < DOMAIN_BOUND:
            raise InvalidInputError(f'网格范围不能小于 [-{DOMAIN_BOUND}, {DOMAIN_BOUND}]')
        intervals = (self.hi - self.lo) / step
        if abs(intervals - round(intervals)) > NODE_COUNT_TOL * max(1.0, intervals):
            raise InvalidInputError(f'(hi - lo) / step = {intervals} 不是整数')

    @property
    def nodes_per_axis(self) -> int:
        return int(round((self.hi - self.lo) / self.step)) + 1

    @property
    def cells(self) -> int:
        return self.nodes_per_axis ** self.q

    def axis(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.nodes_per_axis)

    def axes(self) -> tuple:
        return tuple(self.axis() for _ in range(self.q))

    def as_dict(self) -> dict:
        return {'q': self.q, 'lo': self.lo, 'hi': self.hi, 'step': self.step}


@dataclass(frozen=True)
class CdfGrid:
    axes: tuple
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        values = np.asarray(self.values, dtype=float)
        if values.shape != tuple(a.size for a in axes):
            raise InvalidInputError(f'网格取值形状 {values.shape} 与坐标轴长度不匹配')
        for a in axes:
            if a.size < 2 or np.any(np.diff(a) <= 0):
                raise InvalidInputError('网格坐标轴必须严格递增且至少两个节点')
        object.__setattr__(self, 'axes', axes)
        object.__setattr__(self, 'values', values)

    @property
    def q(self) -> int:
        return len(self.axes)

    @property
    def lower(self) -> np.ndarray:
        return np.array([a[0] for a in self.axes])

    @property
    def upper(self) -> np.ndarray:
        return np.array([a[-1] for a in self.axes])

    def interpolate(self, points) -> np.ndarray:
        """多线性插值；网格外的点先截断到边界（CDF 单调）"""
        points = np.clip(np.atleast_2d(points), self.lower, self.upper)
        interpolator = RegularGridInterpolator(self.axes, self.values, method='linear')
        return interpolator(points)


def evaluate_cdf_grid(model: MvnModel, spec: GridSpec, max_cells: Optional[int] = None) -> CdfGrid:
    """在网格每个节点上求 mvn_cdf"""
    if model.q != spec.q:
        raise InvalidInputError(f'模型维度 {model.q} 与网格维度 {spec.q} 不一致')
    check_grid_cells(spec.cells, max_cells)
    values = mvn_cdf_tensor(spec.axes(), model)
    return CdfGrid(spec.axes(), values, meta=spec.as_dict())


def domain_mass_bound(q: int) -> float:
    """[-4, 4]^q 内概率质量的 Bonferroni 下界 1 - q(1 - Φ(4) + Φ(-4))"""
    q = int(q)
    if q < 1:
        raise InvalidInputError(f'变量个数至少为 1，当前 {q}')
    return float(1.0 - q * (1.0 - ndtr(DOMAIN_BOUND) + ndtr(-DOMAIN_BOUND)))


# ---------------------------------------------------------------- 三次卷积上采样

def _keys_weights(t: np.ndarray) -> np.ndarray:
    """Keys 三次卷积核（a = -0.5）对应 p[-1], p[0], p[1], p[2] 的权重"""
    t2, t3 = t * t, t * t * t
    return np.stack([
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ])


def _upsample_axis(values: np.ndarray, factor: int, axis: int) -> np.ndarray:
    values = np.moveaxis(values, axis, 0)
    n = values.shape[0]
    if n >= 3:
        # 边界外的虚拟节点按 Keys 的三阶外推补齐
        before = 3 * values[0] - 3 * values[1] + values[2]
        after = 3 * values[-1] - 3 * values[-2] + values[-3]
    else:
        before = 2 * values[0] - values[1]
        after = 2 * values[-1] - values[-2]
    padded = np.concatenate([before[None], values, after[None]], axis=0)
    positions = np.arange((n - 1) * factor + 1) / factor
    base = np.minimum(np.floor(positions).astype(int), n - 2)
    frac = positions - base
    weights = _keys_weights(frac)
    out = np.zeros((positions.size,) + values.shape[1:])
    shape = (-1,) + (1,) * (values.ndim - 1)
    for k in range(4):
        out += weights[k].reshape(shape) * padded[base + k]
    return np.moveaxis(out, 0, axis)


def upsample_grid(grid: CdfGrid, factor: int, max_cells: Optional[int] = None) -> CdfGrid:
    """
    按因子 factor 在每个轴上加密并沿各轴保持单调。

    新节点先夹在所在单元的下角与上角原节点值之间，再逐轴取累计最大；
    原网格单调时，原节点的值保持不变。
    """
    factor = int(factor)
    if factor < 1:
        raise InvalidInputError(f'上采样因子必须 ≥ 1，当前 {factor}')
    if factor == 1:
        return grid
    new_sizes = [(a.size - 1) * factor + 1 for a in grid.axes]
    check_grid_cells(math.prod(new_sizes), max_cells, what='上采样网格')
    values = grid.values
    for axis in range(grid.q):
        values = _upsample_axis(values, factor, axis)
    lower = grid.values[np.ix_(*[np.arange(size) // factor for size in new_sizes])]
    upper = grid.values[np.ix_(*[(np.arange(size) + factor - 1) // factor for size in new_sizes])]
    values = np.clip(np.clip(values, lower, upper), 0.0, 1.0)
    for axis in range(grid.q):
        values = np.maximum.accumulate(values, axis=axis)
    axes = tuple(np.linspace(a[0], a[-1], size) for a, size in zip(grid.axes, new_sizes))
    meta = dict(grid.meta, upsample_factor=factor * grid.meta.get('upsample_factor', 1))
    return CdfGrid(axes, values, meta=meta)


@dataclass(frozen=True)
class GridQuantileRegion:
    """
    由 CDF 网格定义的 {x | F̂(x) ≤ τ}：原始域中的点先按 (x - centering) / scaling
    变换到网格所在的标准化域再插值。
    """
    grid: CdfGrid
    tau: float
    centering: np.ndarray
    scaling: np.ndarray

    def contains(self, points: np.ndarray) -> np.ndarray:
        standardized = (np.asarray(points, dtype=float) - self.centering) / self.scaling
        return self.grid.interpolate(standardized) <= self.tau
