"""
已知参数分位数接口序列化器
"""
import numpy as np
from rest_framework import serializers

from core_stats.serializers import ModelSerializer, matrix_field
from mvn.services.correlation import CorrelationMatrix
from utils.exceptions import InvalidInputError
from .services.probability import ADJUST_MODES

TAU_HELP = '概率 τ ∈ (0, 1)'


class CorrelationSerializer(serializers.Serializer):
    tau = serializers.FloatField(help_text=TAU_HELP)
    corr = matrix_field(help_text='相关矩阵（q×q，对角线为 1）')

    def validate(self, attrs):
        try:
            attrs['correlation'] = CorrelationMatrix(np.array(attrs['corr']))
        except (InvalidInputError, ValueError) as exc:
            raise serializers.ValidationError(str(exc))
        return attrs


class BoundsSerializer(serializers.Serializer):
    tau = serializers.FloatField(help_text='单变量分位概率 τ_i')
    q = serializers.IntegerField(min_value=1, max_value=64, help_text='变量个数')


class AdjustedTauSerializer(serializers.Serializer):
    tau_joint = serializers.FloatField(help_text='目标联合概率 τ_J')
    q = serializers.IntegerField(min_value=1, max_value=64, help_text='变量个数')
    mode = serializers.ChoiceField(choices=ADJUST_MODES, default='independent', help_text='调整方式')


class SweepSerializer(serializers.Serializer):
    tau = serializers.FloatField(help_text=TAU_HELP)
    q_max = serializers.IntegerField(min_value=1, max_value=64, default=20, help_text='最大变量个数')


class CriticalPointSerializer(ModelSerializer):
    tau = serializers.FloatField(help_text=TAU_HELP)
