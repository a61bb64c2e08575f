"""
已知参数分位数URL配置
"""
from django.urls import path
from .views import (
    AdjustedTauView,
    BoundsView,
    CriticalPointView,
    EquicoordinateView,
    JointProbabilityView,
    SweepView,
)

urlpatterns = [
    path('joint-probability/', JointProbabilityView.as_view(), name='joint_probability'),
    path('bounds/', BoundsView.as_view(), name='probability_bounds'),
    path('adjusted-tau/', AdjustedTauView.as_view(), name='adjusted_tau'),
    path('sweep/', SweepView.as_view(), name='multiple_comparison_sweep'),
    path('equicoordinate/', EquicoordinateView.as_view(), name='equicoordinate_quantile'),
    path('critical-point/', CriticalPointView.as_view(), name='critical_point'),
]

"""
API端点说明：
1. POST /api/quantiles/joint-probability/
   请求: {"tau": 0.9, "corr": [[1, 0.99], [0.99, 1]]}
   响应: {"data": {"tau_individual": 0.9, "tau_joint": 0.8901}}

2. POST /api/quantiles/bounds/ - Bonferroni 下界、独立情形与上界
   请求: {"tau": 0.9, "q": 3}
   响应: {"data": {"lower": 0.7, "upper": 0.9, "independent_case": 0.729}}

3. POST /api/quantiles/adjusted-tau/ - 达到联合概率所需的单变量 τ_i
   请求: {"tau_joint": 0.9, "q": 2, "mode": "bonferroni"}
   响应: {"data": {"tau_individual": 0.95, "mode": "bonferroni"}}

4. POST /api/quantiles/sweep/ - q = 1..q_max 的概率界表
   请求: {"tau": 0.9, "q_max": 20}

5. POST /api/quantiles/equicoordinate/
   请求: {"tau": 0.81, "corr": [[1, 0], [0, 1]]}
   响应: {"data": {"tau": 0.81, "value": 1.2816}}

6. POST /api/quantiles/critical-point/ - 已知模型的临界点
   请求: {"tau": 0.9, "mean": [0, 0], "cov": [[1, 0.5], [0.5, 1]]}
   响应: {"data": {"point": [...], "tau": 0.9, "equicoordinate_value": ...}}
"""
