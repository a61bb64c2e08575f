"""
多元正态分布接口序列化器
"""
from rest_framework import serializers

from core_stats.serializers import ModelSerializer, vector_field


class PointRequestSerializer(ModelSerializer):
    """在一点处求 CDF / PDF"""
    x = vector_field(help_text='求值点')
    abs_tol = serializers.FloatField(required=False, min_value=1e-12, help_text='CDF 绝对误差容限')

    def validate(self, attrs):
        attrs = super().validate(attrs)
        if len(attrs['x']) != attrs['model'].q:
            raise serializers.ValidationError('求值点维度与模型维度不一致')
        return attrs


class QuantileRequestSerializer(serializers.Serializer):
    tau = serializers.FloatField(help_text='概率 τ ∈ (0, 1)')
