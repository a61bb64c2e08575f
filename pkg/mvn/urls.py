"""
多元正态分布URL配置
"""
from django.urls import path
from .views import CdfView, NormalQuantileView, PdfView

urlpatterns = [
    path('cdf/', CdfView.as_view(), name='mvn_cdf'),
    path('pdf/', PdfView.as_view(), name='mvn_pdf'),
    path('quantile/', NormalQuantileView.as_view(), name='normal_quantile'),
]

"""
API端点说明：
1. POST /api/mvn/cdf/ - 多元正态 CDF
   请求: {"x": [1.2816, 1.2816], "mean": [0, 0], "cov": [[1, 0], [0, 1]], "abs_tol": 1e-6}
   响应: {"code": 200, "message": "success", "data": {"cdf": 0.81, "abs_tol": 1e-06}}

2. POST /api/mvn/pdf/ - 多元正态密度
   请求同上（abs_tol 忽略），响应: {"data": {"pdf": 0.0289}}

3. POST /api/mvn/quantile/ - 标准正态分位数 Φ⁻¹(τ)
   请求: {"tau": 0.9}
   响应: {"data": {"tau": 0.9, "quantile": 1.2816}}

参数不合法时返回 code=400，数值计算失败返回 code=422。
"""
