"""
从提取出的分位数集合上求临界点（方法一）

intersection：集合与对角线 x₁=…=x_q 的交点；
其余选择器在顶点上取极值，用于和交点法对比。
"""
import logging
from typing import Optional

import numpy as np

from core_stats.services.matrices import MvnModel, mahalanobis_sq_many
from mvn.services.distribution import mvn_logpdf, normal_quantile
from utils.exceptions import GeometryError, InvalidInputError
from .contours import QuantileSet

logger = logging.getLogger(__name__)

SELECTORS = ('intersection', 'max_pdf', 'min_translated_l2', 'min_mahalanobis')
HIT_EPS = 1e-12
HIT_SPREAD = 1e-6


def _segment_crossings(vertices: np.ndarray, topology: np.ndarray) -> np.ndarray:
    p0, p1 = vertices[topology[:, 0]], vertices[topology[:, 1]]
    s0 = p0[:, 0] - p0[:, 1]
    s1 = p1[:, 0] - p1[:, 1]
    hit = (s0 * s1 <= 0) & (s0 != s1)
    if not hit.any():
        return np.empty((0, 2))
    p0, p1, s0, s1 = p0[hit], p1[hit], s0[hit], s1[hit]
    t = s0 / (s0 - s1)
    return p0 + t[:, None] * (p1 - p0)


def _triangle_crossings(vertices: np.ndarray, topology: np.ndarray) -> np.ndarray:
    """Möller–Trumbore：过原点、方向 1 的直线与所有三角形求交"""
    direction = np.ones(3) / np.sqrt(3.0)
    v0, v1, v2 = (vertices[topology[:, k]] for k in range(3))
    e1, e2 = v1 - v0, v2 - v0
    pvec = np.cross(direction, e2)
    det = np.einsum('ij,ij->i', e1, pvec)
    ok = np.abs(det) > HIT_EPS
    if not ok.any():
        return np.empty((0, 3))
    v0, e1, e2, pvec, det = v0[ok], e1[ok], e2[ok], pvec[ok], det[ok]
    tvec = -v0
    u = np.einsum('ij,ij->i', tvec, pvec) / det
    qvec = np.cross(tvec, e1)
    v = qvec @ direction / det
    t = np.einsum('ij,ij->i', e2, qvec) / det
    tol = 1e-9
    inside = (u >= -tol) & (v >= -tol) & (u + v <= 1 + tol)
    return t[inside][:, None] * direction


def critical_point_from_set(qset: QuantileSet) -> np.ndarray:
    """集合与对角线的交点；标准化域中即为临界点"""
    if qset.domain_tag != 'standardized':
        raise InvalidInputError('对角线交点只在标准化域中定义')
    if qset.q == 2:
        hits = _segment_crossings(qset.vertices, qset.topology)
    elif qset.q == 3:
        hits = _triangle_crossings(qset.vertices, qset.topology)
    else:
        raise InvalidInputError(f'不支持 q={qset.q} 的集合')
    if hits.shape[0] == 0:
        raise GeometryError(f'τ={qset.tau} 的集合与对角线没有交点，网格范围可能被截断')
    spread = float(np.max(np.ptp(hits, axis=0)))
    if spread > HIT_SPREAD:
        logger.warning(f'集合与对角线有多个交点（跨度 {spread:.3g}），取距离原点最远者')
        return hits[int(np.argmax(hits.sum(axis=1)))]
    return hits.mean(axis=0)


def _standardized_vertices(qset: QuantileSet, model: Optional[MvnModel]) -> np.ndarray:
    if qset.domain_tag == 'standardized':
        return qset.vertices
    if model is None:
        raise InvalidInputError('原始域集合需要提供模型才能标准化')
    return (qset.vertices - model.mean) / model.std


def critical_point_by_selector(qset: QuantileSet, selector: str = 'intersection',
                               model: Optional[MvnModel] = None) -> np.ndarray:
    if selector not in SELECTORS:
        raise InvalidInputError(f'未知的临界点选择器: {selector}')
    if selector == 'intersection':
        return critical_point_from_set(qset)
    if selector == 'min_translated_l2':
        # 平移 -Φ⁻¹(τ) 后集合位于正卦限，取离原点最近的顶点
        shifted = _standardized_vertices(qset, model) - normal_quantile(qset.tau)
        return qset.vertices[int(np.argmin(np.linalg.norm(shifted, axis=1)))].copy()
    if model is None:
        raise InvalidInputError(f'选择器 {selector} 需要已知模型')
    if model.q != qset.q:
        raise InvalidInputError('模型维度与集合维度不一致')
    if selector == 'max_pdf':
        index = int(np.argmax(mvn_logpdf(qset.vertices, model)))
    else:
        index = int(np.argmin(mahalanobis_sq_many(qset.vertices, model.mean, model.cov)))
    return qset.vertices[index].copy()
