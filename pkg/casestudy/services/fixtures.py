"""
内置数据：200.24 Hz 处 9 次冲击试验的三轴 SRS 值（单位 G）及其参考结果
"""
import numpy as np

from core_stats.services.matrices import DataMatrix

FIXTURE_FREQUENCY = 200.24
FIXTURE_AXES = ('X', 'Y', 'Z')

FIXTURE_VALUES = np.array([
    [8.49, 5.76, 2.75],
    [6.44, 7.81, 3.80],
    [5.26, 5.65, 2.67],
    [3.27, 4.27, 3.27],
    [4.81, 5.65, 2.47],
    [3.66, 10.64, 3.24],
    [4.96, 6.63, 3.62],
    [5.23, 14.61, 3.39],
    [5.27, 10.14, 4.06],
])

# 各样本的马氏距离平方（发表值）。数据本身已舍入到两位小数，
# 由它重算的距离与发表值最多差约 0.03（第 2 行 2.09 对 2.12），KS p 约 0.709
FIXTURE_MAHALANOBIS_SQ = (4.99, 2.12, 1.25, 3.36, 2.33, 1.95, 1.07, 4.64, 2.28)

# τ=0.90、置信度 0.95 下的参考规范值
REFERENCE = {
    'critical_point_ci': (10.0476, 18.2621, 4.5783),
    'univariate_tolerance': (9.0081, 15.9969, 4.5694),
    'bonferroni_tolerance': (9.8128, 17.7368, 4.8529),
    'tau_joint': 0.76302,
    'ad_p': 0.6054,
    'ks_p': 0.7185,
}


def fixture_matrix() -> DataMatrix:
    return DataMatrix(FIXTURE_VALUES.copy(), labels=FIXTURE_AXES)


def fixture_ensemble():
    from .ensemble import SrsEnsemble

    return SrsEnsemble(frequencies=(FIXTURE_FREQUENCY,), matrices=(fixture_matrix(),), labels=FIXTURE_AXES)
