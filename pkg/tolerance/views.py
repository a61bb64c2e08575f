"""
容差基线视图
"""
from rest_framework.permissions import AllowAny
from rest_framework.views import APIView

from utils.response import success_response
from .serializers import ChiSquareSerializer, ToleranceRequestSerializer
from .services.limits import chi_square_quantile, simultaneous_upper_tolerance, univariate_upper_tolerances


class UpperToleranceView(APIView):
    """逐列单变量与 Bonferroni 同时容许上限"""
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = ToleranceRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        matrix = data['matrix']
        return success_response({
            'labels': list(matrix.column_labels()),
            'univariate': univariate_upper_tolerances(matrix, data['beta'], data['confidence']).tolist(),
            'bonferroni': simultaneous_upper_tolerance(matrix, data['beta'], data['confidence']).tolist(),
        })


class ChiSquareView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = ChiSquareSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        return success_response({'quantile': chi_square_quantile(data['prob'], data['dof'])})
