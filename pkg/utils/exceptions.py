"""
统一异常类型

所有计算服务抛出的业务异常都继承自 QuantileError，
命令行按 exit_code 退出（2：输入/解析错误，3：数值错误），
HTTP 接口由 utils.response.custom_exception_handler 转成统一响应格式。
"""


class QuantileError(RuntimeError):
    """分位数计算异常基类"""
    exit_code = 3
    http_status = 422


class InvalidInputError(QuantileError, ValueError):
    """参数或数据不合法"""
    exit_code = 2
    http_status = 400


class InsufficientSamplesError(InvalidInputError):
    """样本量不足"""


class DegenerateColumnError(InvalidInputError):
    """某一列样本标准差为零"""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f'第 {column} 列方差为零，无法标准化')


class SingularMatrixError(QuantileError):
    """协方差矩阵奇异或非正定"""


class AccuracyNotMetError(QuantileError):
    """CDF积分在给定点数内未达到误差容限"""

    def __init__(self, estimate, error, message=None):
        self.estimate = estimate
        self.error = error
        super().__init__(
            message or f'CDF未达到精度要求：估计值 {estimate:.8g}，误差界 {error:.3g}'
        )


class ResourceError(QuantileError):
    """网格内存估算超过上限"""


class EmptySetError(QuantileError):
    """分位数水平不在网格CDF取值范围内"""


class GeometryError(QuantileError):
    """分位数几何与对角线无交点（通常是网格截断）"""


class DegenerateResampleError(QuantileError):
    """重抽样多次后仍然退化"""


class NumericalError(QuantileError):
    """求根等数值过程失败"""
