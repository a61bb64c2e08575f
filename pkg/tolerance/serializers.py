"""
容差基线接口序列化器
"""
from rest_framework import serializers

from core_stats.serializers import DataSerializer


class ToleranceRequestSerializer(DataSerializer):
    beta = serializers.FloatField(default=0.9, help_text='覆盖比例 β')
    confidence = serializers.FloatField(default=0.95, help_text='置信度 1 − α')


class ChiSquareSerializer(serializers.Serializer):
    prob = serializers.FloatField(help_text='概率')
    dof = serializers.IntegerField(help_text='自由度')
