"""
simulation.services

三个算法的蒙特卡洛验证研究：预设（smoke / desk / full）、逐单元试验与结果表。
"""
