"""
bootstrap.services

参数/非参数重抽样，百分位、偏差校正与 BCa 置信区间（标量、向量和网格张量），
以及按派生种子并行执行重复样本的工具。
"""
