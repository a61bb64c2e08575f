"""
tolerance.services

对比基线：单变量单侧容许上限、Bonferroni 同时容许上限、椭圆容许域因子 r。
"""
