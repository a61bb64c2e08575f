"""
quantiles.services

已知模型上的标量分位数计算：等坐标分位数、联合分位概率、Bonferroni 界、
临界点以及覆盖率泛函 β 的蒙特卡洛估计。
"""
