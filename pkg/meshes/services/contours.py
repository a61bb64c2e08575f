"""
分位数等值线 / 等值面提取

q=2：marching squares，鞍点单元按单元中心均值判定；
q=3：每个立方体单元沿主对角线切成 6 个四面体做 marching tetrahedra。
两种情况都在单元边上线性插值，并按全局边编号合并重复顶点。
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from core_stats.services.matrices import MvnModel, destandardize
from mvn.services.distribution import CdfAccuracy, mvn_cdf_many
from utils.exceptions import EmptySetError, InvalidInputError
from .grid import CdfGrid

logger = logging.getLogger(__name__)

DOMAIN_TAGS = ('standardized', 'original')


@dataclass(frozen=True)
class QuantileSet:
    """Q(τ) 的有限近似：线段（q=2）或三角形（q=3）"""
    tau: float
    vertices: np.ndarray
    topology: np.ndarray
    domain_tag: str = 'standardized'
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.domain_tag not in DOMAIN_TAGS:
            raise InvalidInputError(f'未知的坐标域: {self.domain_tag}')
        object.__setattr__(self, 'vertices', np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, 'topology', np.asarray(self.topology, dtype=np.int64))

    @property
    def q(self) -> int:
        return self.vertices.shape[1]

    def to_original(self, centering, scaling) -> 'QuantileSet':
        if self.domain_tag == 'original':
            return self
        meta = dict(self.meta, centering=list(map(float, centering)), scaling=list(map(float, scaling)))
        return replace(self, vertices=destandardize(self.vertices, centering, scaling),
                       domain_tag='original', meta=meta)


def _check_level(grid: CdfGrid, tau: float) -> None:
    lo, hi = float(np.min(grid.values)), float(np.max(grid.values))
    if not lo < tau < hi:
        raise EmptySetError(f'τ={tau} 不在网格 CDF 取值范围 ({lo:.6g}, {hi:.6g}) 内，分位数集合为空')


def _edge_vertices(grid: CdfGrid, flat: np.ndarray, edge_a: np.ndarray, edge_b: np.ndarray, tau: float):
    """按 (a, b) 全局节点编号去重后在边上线性插值，返回顶点坐标与每条边的顶点序号"""
    lo = np.minimum(edge_a, edge_b)
    hi = np.maximum(edge_a, edge_b)
    keys = lo * flat.size + hi
    unique_keys, inverse = np.unique(keys, return_inverse=True)
    a = unique_keys // flat.size
    b = unique_keys % flat.size
    va, vb = flat[a], flat[b]
    t = np.clip((tau - va) / (vb - va), 0.0, 1.0)
    shape = grid.values.shape
    ca = np.stack([ax[idx] for ax, idx in zip(grid.axes, np.unravel_index(a, shape))], axis=1)
    cb = np.stack([ax[idx] for ax, idx in zip(grid.axes, np.unravel_index(b, shape))], axis=1)
    return ca + t[:, None] * (cb - ca), inverse


# ---------------------------------------------------------------- marching squares

# 角点顺序 (0,0) (1,0) (1,1) (0,1)，边 e_k 连接角点 k 与 k+1
_SQ_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))
_SQ_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0))


def _square_table() -> dict:
    """case -> 线段列表（边序号对）；鞍点 case 5/10 单独处理"""
    table = {}
    for case in range(16):
        inside = [(case >> k) & 1 for k in range(4)]
        crossing = [e for e, (u, w) in enumerate(_SQ_EDGES) if inside[u] != inside[w]]
        if len(crossing) == 2:
            table[case] = [tuple(crossing)]
        else:
            table[case] = []
    return table


_SQ_TABLE = _square_table()
# 鞍点：键为 (case, 中心是否在内部)，中心在内部时两个内部角点连通
_SADDLE_SEGMENTS = {
    (5, True): [(0, 1), (2, 3)],
    (5, False): [(3, 0), (1, 2)],
    (10, True): [(3, 0), (1, 2)],
    (10, False): [(0, 1), (2, 3)],
}


def _marching_squares(grid: CdfGrid, tau: float):
    values = grid.values
    nx, ny = values.shape
    flat = values.ravel()
    inside = values < tau
    corner_inside = [inside[i:nx - 1 + i, j:ny - 1 + j] for i, j in _SQ_CORNERS]
    case = sum(c.astype(np.int64) << k for k, c in enumerate(corner_inside))
    center_mean = (values[:-1, :-1] + values[1:, :-1] + values[1:, 1:] + values[:-1, 1:]) / 4
    # 鞍点按中心均值判断中心是否在 {F < τ} 内
    center_inside = center_mean < tau

    ci, cj = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing='ij')
    corner_index = [np.ravel_multi_index((ci + i, cj + j), (nx, ny)) for i, j in _SQ_CORNERS]

    seg_a, seg_b = [], []
    for code in range(1, 15):
        mask = case == code
        if not mask.any():
            continue
        if code in (5, 10):
            variants = [(mask & center_inside, _SADDLE_SEGMENTS[(code, True)]),
                        (mask & ~center_inside, _SADDLE_SEGMENTS[(code, False)])]
        else:
            variants = [(mask, _SQ_TABLE[code])]
        for cell_mask, segments in variants:
            if not cell_mask.any():
                continue
            corners = [c[cell_mask] for c in corner_index]
            for e0, e1 in segments:
                u0, w0 = _SQ_EDGES[e0]
                u1, w1 = _SQ_EDGES[e1]
                seg_a.append(np.stack([corners[u0], corners[w0]], axis=1))
                seg_b.append(np.stack([corners[u1], corners[w1]], axis=1))
    if not seg_a:
        raise EmptySetError(f'τ={tau} 的等值线为空')
    ends_a = np.concatenate(seg_a)
    ends_b = np.concatenate(seg_b)
    edges = np.concatenate([ends_a, ends_b])
    vertices, inverse = _edge_vertices(grid, flat, edges[:, 0], edges[:, 1], tau)
    m = ends_a.shape[0]
    topology = np.stack([inverse[:m], inverse[m:]], axis=1)
    return vertices, topology


# ---------------------------------------------------------------- marching tetrahedra

_CUBE_TETS = []
for _perm in itertools.permutations(range(3)):
    _path = [(0, 0, 0)]
    _cur = [0, 0, 0]
    for _axis in _perm:
        _cur[_axis] = 1
        _path.append(tuple(_cur))
    _CUBE_TETS.append(tuple(_path))
_TET_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _edge_id(u: int, w: int) -> int:
    return _TET_EDGES.index((min(u, w), max(u, w)))


def _tet_table() -> dict:
    """case -> 三角形列表（每个三角形为 3 条四面体边）"""
    table = {}
    for case in range(16):
        inside = [(case >> k) & 1 for k in range(4)]
        ones = [k for k in range(4) if inside[k]]
        zeros = [k for k in range(4) if not inside[k]]
        if len(ones) in (0, 4):
            table[case] = []
        elif len(ones) in (1, 3):
            lone = ones[0] if len(ones) == 1 else zeros[0]
            others = [k for k in range(4) if k != lone]
            table[case] = [tuple(_edge_id(lone, o) for o in others)]
        else:
            a, b = ones
            c, d = zeros
            ac, ad, bd, bc = _edge_id(a, c), _edge_id(a, d), _edge_id(b, d), _edge_id(b, c)
            table[case] = [(ac, ad, bd), (ac, bd, bc)]
    return table


_TET_TABLE = _tet_table()


def _marching_tetrahedra(grid: CdfGrid, tau: float):
    values = grid.values
    shape = values.shape
    flat = values.ravel()
    inside = values < tau
    nx, ny, nz = shape
    ci, cj, ck = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), np.arange(nz - 1), indexing='ij')
    ci, cj, ck = ci.ravel(), cj.ravel(), ck.ravel()
    # 只保留跨越 τ 的立方体单元
    corners = [
        np.ravel_multi_index((ci + i, cj + j, ck + k), shape)
        for i, j, k in itertools.product((0, 1), repeat=3)
    ]
    cube_inside = np.stack([inside.ravel()[c] for c in corners], axis=1)
    active = cube_inside.any(axis=1) & ~cube_inside.all(axis=1)
    ci, cj, ck = ci[active], cj[active], ck[active]

    tri_a, tri_b = [], []
    for tet in _CUBE_TETS:
        nodes = [np.ravel_multi_index((ci + i, cj + j, ck + k), shape) for i, j, k in tet]
        node_inside = [inside.ravel()[n] for n in nodes]
        case = sum(c.astype(np.int64) << k for k, c in enumerate(node_inside))
        for code in range(1, 15):
            mask = case == code
            if not mask.any():
                continue
            picked = [n[mask] for n in nodes]
            for triangle in _TET_TABLE[code]:
                ends = [_TET_EDGES[e] for e in triangle]
                tri_a.append(np.stack([picked[u] for u, _ in ends], axis=1))
                tri_b.append(np.stack([picked[w] for _, w in ends], axis=1))
    if not tri_a:
        raise EmptySetError(f'τ={tau} 的等值面为空')
    ends_a = np.concatenate(tri_a)
    ends_b = np.concatenate(tri_b)
    vertices, inverse = _edge_vertices(grid, flat, ends_a.ravel(), ends_b.ravel(), tau)
    topology = inverse.reshape(-1, 3)
    # 顶点恰好落在网格节点上时会产生退化三角形
    keep = (topology[:, 0] != topology[:, 1]) & (topology[:, 1] != topology[:, 2]) \
        & (topology[:, 0] != topology[:, 2])
    return vertices, topology[keep]


def extract_quantile(grid: CdfGrid, tau: float) -> QuantileSet:
    """从 CDF 网格提取 Q(τ)"""
    tau = float(tau)
    _check_level(grid, tau)
    if grid.q == 2:
        vertices, topology = _marching_squares(grid, tau)
    elif grid.q == 3:
        vertices, topology = _marching_tetrahedra(grid, tau)
    else:
        raise InvalidInputError(f'只支持二维等值线与三维等值面，当前 q={grid.q}')
    logger.debug(f'提取 τ={tau}: {len(vertices)} 个顶点, {len(topology)} 个单元')
    return QuantileSet(tau=tau, vertices=vertices, topology=topology, meta=dict(grid.meta))


def vertex_residuals(qset: QuantileSet, model: MvnModel, acc: Optional[CdfAccuracy] = None) -> np.ndarray:
    """每个顶点处 |F(v) - τ|，用于检查网格离散误差"""
    return np.abs(mvn_cdf_many(qset.vertices, model, acc) - qset.tau)


def elliptical_boundary(model: MvnModel, r: float, n_points: int = 361) -> QuantileSet:
    """二元模型的椭圆边界 {x | 马氏距离平方 = r}，闭合折线"""
    if model.q != 2:
        raise InvalidInputError('椭圆边界只支持二元模型')
    if not r > 0:
        raise InvalidInputError('r 必须大于 0')
    theta = np.linspace(0.0, 2 * np.pi, int(n_points), endpoint=False)
    circle = np.sqrt(r) * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    factor = np.linalg.cholesky(model.cov)
    vertices = model.mean + circle @ factor.T
    idx = np.arange(theta.size)
    topology = np.stack([idx, np.roll(idx, -1)], axis=1)
    return QuantileSet(tau=float('nan'), vertices=vertices, topology=topology,
                       domain_tag='original', meta={'kind': 'ellipse', 'r': float(r)})
