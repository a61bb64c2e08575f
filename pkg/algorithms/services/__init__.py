"""
algorithms.services

三个置信区间过程：联合分位概率（joint_tau）、分位数等值线/等值面（quantile_ci）
与临界点（critical_point_ci），都由 bootstrap / quantiles / meshes 的服务组合而成。
"""
