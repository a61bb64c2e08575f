"""
已知参数分位数视图
"""
from rest_framework.permissions import AllowAny
from rest_framework.views import APIView

from mvn.services.distribution import CdfAccuracy
from utils.response import success_response
from .serializers import (
    AdjustedTauSerializer,
    BoundsSerializer,
    CorrelationSerializer,
    CriticalPointSerializer,
    SweepSerializer,
)
from .services.critical import critical_point, equicoordinate_quantile
from .services.probability import (
    adjusted_individual_tau,
    bonferroni_bounds,
    joint_quantile_probability,
    multiple_comparison_sweep,
)


class JointProbabilityView(APIView):
    """各变量同时取 τ_i 分位数的联合概率"""
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = CorrelationSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        value = joint_quantile_probability(data['tau'], data['correlation'].values, CdfAccuracy.from_settings())
        return success_response({'tau_individual': data['tau'], 'tau_joint': value})


class BoundsView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = BoundsSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        return success_response(bonferroni_bounds(data['tau'], data['q']).as_dict())


class AdjustedTauView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = AdjustedTauSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        value = adjusted_individual_tau(data['tau_joint'], data['q'], data['mode'])
        return success_response({'tau_individual': value, 'mode': data['mode']})


class SweepView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = SweepSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        table = multiple_comparison_sweep(data['tau'], data['q_max'])
        return success_response(table.to_dict(orient='records'))


class EquicoordinateView(APIView):
    """标准化模型的等坐标分位数 v：F(v·1) = τ"""
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = CorrelationSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        value = equicoordinate_quantile(data['tau'], data['correlation'].values, CdfAccuracy.from_settings())
        return success_response({'tau': data['tau'], 'value': value})


class CriticalPointView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = CriticalPointSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        point = critical_point(data['tau'], data['model'], CdfAccuracy.from_settings())
        return success_response(point.as_dict())
