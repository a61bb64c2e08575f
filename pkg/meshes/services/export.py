"""
分位数集合导出：顶点 CSV + 拓扑 CSV、JSON 元数据、ASCII STL（仅等值面）
"""
import json
import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from utils.exceptions import InvalidInputError
from .contours import QuantileSet

logger = logging.getLogger(__name__)

TOPOLOGY_COLUMNS = {2: ['a', 'b'], 3: ['a', 'b', 'c']}


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f'无法序列化 {type(value)}')


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, default=_json_default), encoding='utf-8')
    return path


def quantile_set_metadata(qset: QuantileSet, residuals: Optional[np.ndarray] = None) -> dict:
    meta = {
        'tau': qset.tau,
        'q': qset.q,
        'domain_tag': qset.domain_tag,
        'n_vertices': int(qset.vertices.shape[0]),
        'n_elements': int(qset.topology.shape[0]),
        'element': 'segment' if qset.topology.shape[1] == 2 else 'triangle',
        'grid': qset.meta,
    }
    if residuals is not None and residuals.size:
        meta['residuals'] = {'mean': float(np.mean(residuals)), 'max': float(np.max(residuals))}
    return meta


def vertices_frame(qset: QuantileSet, labels: Optional[Sequence[str]] = None,
                   residuals: Optional[np.ndarray] = None) -> pd.DataFrame:
    labels = list(labels) if labels else [f'x{j + 1}' for j in range(qset.q)]
    if len(labels) != qset.q:
        raise InvalidInputError('列名个数与集合维度不一致')
    frame = pd.DataFrame(qset.vertices, columns=labels)
    frame.index.name = 'vertex'
    if residuals is not None:
        frame['cdf_residual'] = residuals
    return frame


def stl_text(qset: QuantileSet, name: str = 'quantile') -> str:
    """ASCII STL，法向量由顶点叉积给出"""
    if qset.topology.shape[1] != 3:
        raise InvalidInputError('STL 只能导出三角网格')
    v0, v1, v2 = (qset.vertices[qset.topology[:, k]] for k in range(3))
    normals = np.cross(v1 - v0, v2 - v0)
    lengths = np.linalg.norm(normals, axis=1, keepdims=True)
    normals = np.divide(normals, lengths, out=np.zeros_like(normals), where=lengths > 0)
    lines = [f'solid {name}']
    for n, a, b, c in zip(normals, v0, v1, v2):
        lines.append(f'  facet normal {n[0]:.6e} {n[1]:.6e} {n[2]:.6e}')
        lines.append('    outer loop')
        for p in (a, b, c):
            lines.append(f'      vertex {p[0]:.6e} {p[1]:.6e} {p[2]:.6e}')
        lines.append('    endloop')
        lines.append('  endfacet')
    lines.append(f'endsolid {name}')
    return '\n'.join(lines) + '\n'


def export_quantile_set(qset: QuantileSet, out_dir, stem: str, labels: Optional[Sequence[str]] = None,
                        residuals: Optional[np.ndarray] = None, stl: bool = True) -> dict:
    """写出 <stem>_vertices.csv / <stem>_topology.csv / <stem>.json（q=3 时另有 <stem>.stl），返回路径表"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        'vertices': out_dir / f'{stem}_vertices.csv',
        'topology': out_dir / f'{stem}_topology.csv',
        'metadata': out_dir / f'{stem}.json',
    }
    vertices_frame(qset, labels, residuals).to_csv(paths['vertices'])
    topology = pd.DataFrame(qset.topology, columns=TOPOLOGY_COLUMNS[qset.topology.shape[1]])
    topology.index.name = 'element'
    topology.to_csv(paths['topology'])
    write_json(paths['metadata'], quantile_set_metadata(qset, residuals))
    if stl and qset.topology.shape[1] == 3:
        paths['stl'] = out_dir / f'{stem}.stl'
        paths['stl'].write_text(stl_text(qset, stem), encoding='ascii')
    logger.info(f'分位数集合已导出到 {out_dir}（{stem}）')
    return {key: str(path) for key, path in paths.items()}
