"""
casestudy.services

冲击响应谱（SRS）多轴环境规范：按频率读取样本矩阵，做正态性诊断，
计算临界点上置信限、单变量与 Bonferroni 容差基线以及联合分位概率下界。
"""
