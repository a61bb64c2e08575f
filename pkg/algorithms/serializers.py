"""
自助法置信区间接口序列化器
"""
from rest_framework import serializers

from bootstrap.services.config import CI_METHOD_ALIASES, CI_METHODS, STYLES
from core_stats.serializers import DataSerializer

# 接口同步计算，限制重复次数
MAX_API_B = 5000


class BootstrapRequestSerializer(DataSerializer):
    tau = serializers.FloatField(default=0.9, help_text='分位概率 τ')
    gammas = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0), required=False,
                                   help_text='百分位水平列表')
    b = serializers.IntegerField(min_value=100, max_value=MAX_API_B, default=1000, help_text='自助法重复次数')
    style = serializers.ChoiceField(choices=STYLES, default='nonparametric', help_text='重抽样方式')
    ci_method = serializers.ChoiceField(choices=CI_METHODS + tuple(CI_METHOD_ALIASES), default='percentile',
                                        help_text='置信区间方法')
    seed = serializers.IntegerField(required=False, min_value=0, help_text='随机种子')
