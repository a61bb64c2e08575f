"""
正态性诊断URL配置
"""
from django.urls import path
from .views import DistanceTestView

urlpatterns = [
    path('tests/', DistanceTestView.as_view(), name='normality_tests'),
]

"""
API端点说明：
1. POST /api/normality/tests/
   请求: {"distances": [4.99, 2.12, 1.25, 3.36, 2.33, 1.95, 1.07, 4.64, 2.28], "dof": 3}
   响应: {"data": {"anderson_darling": {"statistic": ..., "p_value": 0.61, "method": "..."},
                   "kolmogorov_smirnov": {"statistic": ..., "p_value": 0.7185, "method": "..."}}}
"""
