"""
自助法置信区间视图（同步计算，适合小样本）
"""
from rest_framework.permissions import AllowAny
from rest_framework.views import APIView

from bootstrap.services.config import BootstrapConfig, PercentileRequest
from utils.response import success_response
from .serializers import BootstrapRequestSerializer
from .services.critical_point_ci import algorithm3_critical_point_ci
from .services.joint_tau import algorithm1_joint_tau_uq


def _parse(request, default_gamma: float):
    serializer = BootstrapRequestSerializer(data=request.data)
    serializer.is_valid(raise_exception=True)
    data = serializer.validated_data
    config = BootstrapConfig(b=data['b'], style=data['style'], ci_method=data['ci_method'], seed=data.get('seed'))
    gammas = PercentileRequest.of(data.get('gammas') or (default_gamma,))
    return data, config, gammas


class JointTauCiView(APIView):
    """联合分位概率 τ_J 的置信区间"""
    permission_classes = [AllowAny]

    def post(self, request):
        data, config, gammas = _parse(request, 0.05)
        result = algorithm1_joint_tau_uq(data['matrix'], data['tau'], gammas, config)
        return success_response(dict(result.as_dict(), seed=config.seed))


class CriticalPointCiView(APIView):
    """临界点的置信限"""
    permission_classes = [AllowAny]

    def post(self, request):
        data, config, gammas = _parse(request, 0.95)
        result = algorithm3_critical_point_ci(data['matrix'], data['tau'], gammas, config)
        return success_response(dict(result.as_dict(), seed=config.seed))
