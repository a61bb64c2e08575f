"""
自助法置信区间URL配置
"""
from django.urls import path
from .views import CriticalPointCiView, JointTauCiView

urlpatterns = [
    path('joint-tau/', JointTauCiView.as_view(), name='joint_tau_ci'),
    path('critical-point/', CriticalPointCiView.as_view(), name='critical_point_ci'),
]

"""
API端点说明：
1. POST /api/algorithms/joint-tau/ - τ_J 的自助法置信区间
   请求: {"data": [[8.49, 5.76, 2.75], ...], "tau": 0.9, "gammas": [0.05], "b": 1000, "ci_method": "bca", "seed": 1}
   响应: {"data": {"tau_individual": 0.9, "gammas": [0.05], "tau_values": [0.763], "estimate": ..., "seed": 1}}

2. POST /api/algorithms/critical-point/ - 临界点置信限（原始域）
   请求: {"data": [[...], ...], "tau": 0.9, "gammas": [0.95], "b": 2000, "ci_method": "bca"}
   响应: {"data": {"tau": 0.9, "points": {"0.95": [10.05, 18.26, 4.58]}, ...}}

分位数等值线/等值面置信集合计算量大，只通过 python manage.py quantile_ci 提供。
"""
