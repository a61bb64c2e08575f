"""
meshes.services

在 [-4, 4]^q 的张量网格上求 CDF、三次卷积上采样，
并用 marching squares / marching tetrahedra 提取分位数等值线与等值面。
"""
