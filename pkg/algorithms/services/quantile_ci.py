"""
分位数等值线 / 等值面的自助法置信区间

1. 数据标准化；
2. 每个重复样本拟合 (x̄*, S*)，在 [-4, 4]^q 网格上求 CDF；
3. 逐单元取百分位，得到每个 γ 的 CDF 网格；
4. 可选三次卷积上采样（ξ = 2）；
5. 在 τ 处提取等值线/等值面并映射回原始域。

γ 的上置信集合对应 CDF 网格的 (1 − γ) 百分位：CDF 越小，{F = τ} 越靠外。
b × 网格的张量按第 0 轴分块计算，不会整体驻留内存。
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bootstrap.services.config import BootstrapConfig, PercentileRequest
from bootstrap.services.intervals import acceleration, adjusted_interval, bias_correction
from bootstrap.services.parallel import run_replicates, run_tasks
from bootstrap.services.resampling import jackknife_samples, resample
from core_stats.services.matrices import DataMatrix, MvnModel, fit_model, standardize
from meshes.services.contours import QuantileSet, extract_quantile
from meshes.services.critical import critical_point_from_set
from meshes.services.grid import CdfGrid, GridQuantileRegion, GridSpec, check_grid_cells, upsample_grid
from mvn.services.distribution import mvn_cdf_tensor
from utils.exceptions import GeometryError, InvalidInputError
from utils.rng import make_rng
from .common import check_sample_size, check_tau

logger = logging.getLogger(__name__)

# 每个分块中 (重复样本数 × 单元数) 的上限
SLAB_CELLS = 2 ** 25
UPSAMPLE_FACTOR = 2


@dataclass(frozen=True)
class QuantileCiResult:
    tau: float
    gamma_sets: dict
    config: BootstrapConfig
    grid: GridSpec
    grids: dict = field(default_factory=dict, compare=False, repr=False)
    critical_points: dict = field(default_factory=dict, compare=False)
    centering: np.ndarray = None
    scaling: np.ndarray = None
    interpolate: bool = True
    method: str = 'percentile'
    fallback_cells: int = 0
    labels: tuple = ()
    duration: float = 0.0

    def quantile_set(self, gamma: float) -> QuantileSet:
        return self.gamma_sets[float(gamma)]

    def region(self, gamma: float) -> GridQuantileRegion:
        """{x | F̂_γ(x) ≤ τ}，用于覆盖率 β̂"""
        return GridQuantileRegion(self.grids[float(gamma)], self.tau, self.centering, self.scaling)

    def as_dict(self) -> dict:
        return {
            'tau': self.tau,
            'gammas': sorted(self.gamma_sets),
            'labels': list(self.labels),
            'grid': self.grid.as_dict(),
            'interpolate': self.interpolate,
            'bootstrap': self.config.as_dict(),
            'ci_method': self.method,
            'fallback_cells': self.fallback_cells,
            'centering': [float(v) for v in self.centering],
            'scaling': [float(v) for v in self.scaling],
            'sets': {
                str(g): {
                    'n_vertices': int(s.vertices.shape[0]),
                    'n_elements': int(s.topology.shape[0]),
                    'critical_point': (None if self.critical_points.get(g) is None
                                       else [float(v) for v in self.critical_points[g]]),
                    'residuals': s.meta.get('residuals'),
                }
                for g, s in self.gamma_sets.items()
            },
            'duration_seconds': round(self.duration, 3),
        }


class _ReplicateModel:
    def __init__(self, data: DataMatrix, config: BootstrapConfig):
        self.data = data
        self.config = config

    def __call__(self, seed_sequence) -> MvnModel:
        return fit_model(resample(self.data, self.config, make_rng(seed_sequence)))


class _SlabCdf:
    """一个分块上的 CDF 张量"""

    def __init__(self, axes: tuple):
        self.axes = axes

    def __call__(self, model: MvnModel) -> np.ndarray:
        return mvn_cdf_tensor(self.axes, model)


def _slab_length(spec: GridSpec, stack_depth: int, max_cells: Optional[int]) -> int:
    per_index = stack_depth * spec.nodes_per_axis ** (spec.q - 1)
    length = max(1, min(spec.nodes_per_axis, SLAB_CELLS // per_index))
    check_grid_cells(length * per_index, max_cells, what='自助法网格分块')
    return length


def _reduce_grids(spec: GridSpec, models: list, request: PercentileRequest, method: str,
                  center: MvnModel, jack_models: list, n_jobs: int, max_cells: Optional[int]):
    """逐块计算 b 个 CDF 网格并取每个 γ 对应的 (1 − γ) 水平"""
    levels = PercentileRequest(tuple(1.0 - g for g in request.gammas))
    order = [int(np.argmin(np.abs(np.asarray(levels.gammas) - (1.0 - g)))) for g in request.gammas]
    axes = spec.axes()
    depth = len(models) + len(jack_models) + 1
    length = _slab_length(spec, depth, max_cells)
    out = np.empty((len(request),) + tuple(a.size for a in axes))
    fallback_cells = 0
    for start in range(0, axes[0].size, length):
        stop = min(start + length, axes[0].size)
        task = _SlabCdf((axes[0][start:stop],) + axes[1:])
        stack = np.stack(run_tasks(task, models, n_jobs=n_jobs, desc=f'CDF 网格 {start}:{stop}'))
        if method == 'percentile':
            reduced = np.quantile(stack, levels.gammas, axis=0, method='linear')
        else:
            z0 = bias_correction(stack, task(center))
            accel = 0.0
            if method == 'bca':
                accel = acceleration(np.stack([task(m) for m in jack_models]))
            interval = adjusted_interval(stack, levels, z0, accel, method=method)
            reduced = interval.values
            fallback_cells += interval.fallback_cells
        out[:, start:stop] = reduced[order]
    out = np.clip(out, 0.0, 1.0)
    if method != 'percentile':
        # 逐单元调整后的水平不同，重新保证沿各轴单调
        for axis in range(1, out.ndim):
            out = np.maximum.accumulate(out, axis=axis)
    return out, fallback_cells


def _diagonal_point(qset: QuantileSet) -> Optional[np.ndarray]:
    try:
        return critical_point_from_set(qset)
    except GeometryError as exc:
        logger.warning(f'方法一临界点不可用: {exc}')
        return None


def algorithm2_quantile_ci(data: DataMatrix, tau: float, request: PercentileRequest, config: BootstrapConfig,
                           grid: Optional[GridSpec] = None, interpolate: bool = True,
                           max_cells: Optional[int] = None) -> QuantileCiResult:
    tau = check_tau(tau)
    check_sample_size(data)
    grid = grid or GridSpec(q=data.q)
    if grid.q != data.q:
        raise InvalidInputError(f'数据维度 {data.q} 与网格维度 {grid.q} 不一致')
    check_grid_cells(grid.cells, max_cells)
    if interpolate:
        check_grid_cells(((grid.nodes_per_axis - 1) * UPSAMPLE_FACTOR + 1) ** grid.q, max_cells, what='上采样网格')
    started = time.perf_counter()

    standardized = standardize(data)
    work = standardized.as_data_matrix()
    models = run_replicates(_ReplicateModel(work, config), config.seed, config.b,
                            n_jobs=config.n_jobs, desc='重抽样')
    center = fit_model(work)
    jack_models = [fit_model(s) for s in jackknife_samples(work)] if config.ci_method == 'bca' else []
    values, fallback_cells = _reduce_grids(grid, models, request, config.ci_method, center, jack_models,
                                           config.n_jobs, max_cells)

    gamma_sets, grids, critical_points = {}, {}, {}
    for i, gamma in enumerate(request.gammas):
        cdf_grid = CdfGrid(grid.axes(), values[i], meta=dict(grid.as_dict(), gamma=gamma, level=1.0 - gamma))
        if interpolate:
            cdf_grid = upsample_grid(cdf_grid, UPSAMPLE_FACTOR, max_cells)
        qset = extract_quantile(cdf_grid, tau)
        residuals = np.abs(cdf_grid.interpolate(qset.vertices) - tau)
        qset = QuantileSet(qset.tau, qset.vertices, qset.topology, qset.domain_tag,
                           dict(qset.meta, residuals={'mean': float(residuals.mean()), 'max': float(residuals.max())}))
        point = _diagonal_point(qset)
        grids[gamma] = cdf_grid
        critical_points[gamma] = (
            None if point is None
            else point * standardized.scaling + standardized.centering
        )
        gamma_sets[gamma] = qset.to_original(standardized.centering, standardized.scaling)

    duration = time.perf_counter() - started
    logger.info(f'分位数置信集合完成：τ={tau}, q={data.q}, b={config.b}, 网格步长 {grid.step}, '
                f'用时 {duration:.2f}s')
    return QuantileCiResult(
        tau=tau,
        gamma_sets=gamma_sets,
        config=config,
        grid=grid,
        grids=grids,
        critical_points=critical_points,
        centering=standardized.centering,
        scaling=standardized.scaling,
        interpolate=interpolate,
        method=config.ci_method,
        fallback_cells=fallback_cells,
        labels=data.column_labels(),
        duration=duration,
    )
