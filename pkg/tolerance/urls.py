"""
容差基线URL配置
"""
from django.urls import path
from .views import ChiSquareView, UpperToleranceView

urlpatterns = [
    path('upper/', UpperToleranceView.as_view(), name='upper_tolerance'),
    path('chi-square/', ChiSquareView.as_view(), name='chi_square_quantile'),
]

"""
API端点说明：
1. POST /api/tolerance/upper/
   请求: {"data": [[8.49, 5.76, 2.75], ...], "labels": ["X", "Y", "Z"], "beta": 0.9, "confidence": 0.95}
   响应: {"data": {"labels": [...], "univariate": [9.0081, 15.9969, 4.5694], "bonferroni": [9.8128, 17.7368, 4.8529]}}

2. POST /api/tolerance/chi-square/
   请求: {"prob": 0.9, "dof": 2}
   响应: {"data": {"quantile": 4.6052}}
"""
