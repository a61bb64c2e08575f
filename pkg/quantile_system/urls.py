"""
URL configuration for quantile_system project.
"""
from django.urls import path, include
from drf_spectacular.views import SpectacularAPIView, SpectacularSwaggerView, SpectacularRedocView

urlpatterns = [
    # API文档路由
    path('api/schema/', SpectacularAPIView.as_view(), name='schema'),
    path('api/', SpectacularSwaggerView.as_view(url_name='schema'), name='swagger-ui'),
    path('api/redoc/', SpectacularRedocView.as_view(url_name='schema'), name='redoc'),

    # API路由
    path('api/mvn/', include('mvn.urls')),                 # 多元正态分布基础计算
    path('api/quantiles/', include('quantiles.urls')),     # 已知参数分位数计算
    path('api/algorithms/', include('algorithms.urls')),   # 自助法置信区间
    path('api/tolerance/', include('tolerance.urls')),     # 容差基准
    path('api/normality/', include('normality.urls')),     # 正态性诊断
]
