"""
各接口共用的矩阵 / 模型字段
"""
import numpy as np
from rest_framework import serializers

from core_stats.services.matrices import DataMatrix, MvnModel
from utils.exceptions import InvalidInputError


def vector_field(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), allow_empty=False, **kwargs)


def matrix_field(**kwargs):
    return serializers.ListField(child=vector_field(), allow_empty=False, **kwargs)


class ModelSerializer(serializers.Serializer):
    """N(mean, cov) 参数"""
    mean = vector_field(help_text='均值向量')
    cov = matrix_field(help_text='协方差矩阵（q×q）')

    def validate(self, attrs):
        try:
            attrs['model'] = MvnModel(np.array(attrs['mean']), np.array(attrs['cov']))
        except (InvalidInputError, ValueError) as exc:
            raise serializers.ValidationError(str(exc))
        return attrs


class DataSerializer(serializers.Serializer):
    """观测矩阵：每行一个样本"""
    data = matrix_field(help_text='观测矩阵，每行一个样本')
    labels = serializers.ListField(child=serializers.CharField(), required=False, help_text='列标签')

    def validate(self, attrs):
        rows = attrs['data']
        if len({len(row) for row in rows}) != 1:
            raise serializers.ValidationError('每行的列数必须相同')
        try:
            attrs['matrix'] = DataMatrix(np.array(rows), labels=attrs.get('labels'))
        except InvalidInputError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs
