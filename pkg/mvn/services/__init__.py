"""
mvn.services

多元正态密度、CDF（q=1 误差函数，q=2 Drezner-Wesolowsky/Genz，
q=3 条件化一维积分，q≥4 随机化拟蒙特卡洛）、分位数函数、抽样与 C-vine 随机相关矩阵。
"""
