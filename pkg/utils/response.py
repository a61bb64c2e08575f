"""
统一响应格式 {code, message, data}

计算异常（QuantileError）沿用业务错误的约定：HTTP 200，code 为 400 / 422；
参数校验等框架异常保留框架给出的 HTTP 状态码。
"""
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import exception_handler

from utils.exceptions import AccuracyNotMetError, QuantileError


def _envelope(code, message, data):
    return {'code': code, 'message': message, 'data': data}


def success_response(data=None, message='success', code=200):
    return Response(_envelope(code, message, data), status=status.HTTP_200_OK)


def error_response(message='error', code=400, data=None):
    """业务错误，通过 code 区分"""
    return Response(_envelope(code, message, data), status=status.HTTP_200_OK)


def _error_detail(exc: QuantileError):
    # 精度未达标时把估计值和误差一并返回
    if isinstance(exc, AccuracyNotMetError):
        return {'estimate': exc.estimate, 'error': exc.error}
    column = getattr(exc, 'column', None)
    return {'column': column} if column is not None else None


def custom_exception_handler(exc, context):
    if isinstance(exc, QuantileError):
        return error_response(str(exc), code=exc.http_status, data=_error_detail(exc))

    response = exception_handler(exc, context)
    if response is not None:
        response.data = _envelope(response.status_code, str(exc), None)
    return response
