from rest_framework import serializers

from core_stats.serializers import vector_field


class DistanceTestSerializer(serializers.Serializer):
    distances = vector_field(help_text='马氏距离平方')
    dof = serializers.IntegerField(min_value=1, help_text='自由度（变量个数 q）')
