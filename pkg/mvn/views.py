"""
多元正态分布基础计算视图
"""
import numpy as np
from rest_framework.permissions import AllowAny
from rest_framework.views import APIView

from utils.response import success_response
from .serializers import PointRequestSerializer, QuantileRequestSerializer
from .services.distribution import CdfAccuracy, mvn_cdf, mvn_pdf, normal_quantile


class CdfView(APIView):
    """P(X ≤ x)"""
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = PointRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        acc = CdfAccuracy.from_settings(abs_tol=data.get('abs_tol'))
        value = mvn_cdf(np.array(data['x']), data['model'], acc)
        return success_response({'cdf': value, 'abs_tol': acc.abs_tol})


class PdfView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = PointRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        return success_response({'pdf': float(mvn_pdf(np.array(data['x']), data['model']))})


class NormalQuantileView(APIView):
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = QuantileRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        tau = serializer.validated_data['tau']
        return success_response({'tau': tau, 'quantile': normal_quantile(tau)})
