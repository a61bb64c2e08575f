"""
core_stats.services

样本均值/协方差、标准化变换 Ψ 及其逆变换、马氏距离与矩阵合法性检查，
其余所有模块都建立在这里的数据类型之上。
"""
