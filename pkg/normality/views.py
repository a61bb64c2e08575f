"""
正态性诊断视图
"""
from rest_framework.permissions import AllowAny
from rest_framework.views import APIView

from utils.response import success_response
from .serializers import DistanceTestSerializer
from .services.goodness_of_fit import ad_test_chisq, ks_test_chisq


class DistanceTestView(APIView):
    """马氏距离平方对 χ²_q 的 AD 与 KS 检验"""
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = DistanceTestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        return success_response({
            'anderson_darling': ad_test_chisq(data['distances'], data['dof']).as_dict(),
            'kolmogorov_smirnov': ks_test_chisq(data['distances'], data['dof']).as_dict(),
        })
