"""
CSV 数据读取

每行一个观测，表头可选（首行含非数值单元即视为表头），分隔符可配置。
解析错误在异常信息中给出文件行号。
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from utils.exceptions import InvalidInputError
from .matrices import DataMatrix

logger = logging.getLogger(__name__)


def _is_number(cell) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def read_frame(path, delimiter: str = ',') -> pd.DataFrame:
    """读取为字符串表，空行跳过"""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f'输入文件不存在: {path}')
    try:
        return pd.read_csv(
            path,
            sep=delimiter,
            header=None,
            dtype=str,
            skip_blank_lines=True,
            skipinitialspace=True,
            keep_default_na=False,
        )
    except pd.errors.EmptyDataError as exc:
        raise InvalidInputError(f'输入文件为空: {path}') from exc
    except pd.errors.ParserError as exc:
        raise InvalidInputError(f'CSV 解析失败 {path}: {exc}') from exc


def frame_to_matrix(frame: pd.DataFrame, source='<data>', first_line: int = 1) -> DataMatrix:
    """字符串表转数值矩阵；first_line 是表格第一行在文件中的行号"""
    if frame.empty:
        raise InvalidInputError(f'{source} 没有数据行')
    labels = None
    header_row = frame.iloc[0].tolist()
    if not all(_is_number(cell) for cell in header_row):
        labels = [str(cell).strip() for cell in header_row]
        frame = frame.iloc[1:]
        first_line += 1
    if frame.empty:
        raise InvalidInputError(f'{source} 只有表头，没有数据行')
    numeric = frame.apply(lambda col: pd.to_numeric(col.str.strip(), errors='coerce'))
    bad = numeric.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad))
        raise InvalidInputError(
            f'{source} 第 {first_line + row} 行包含无法解析的数值: {frame.iloc[row].tolist()}'
        )
    logger.debug(f'读取 {source}: {numeric.shape[0]} 行 × {numeric.shape[1]} 列')
    return DataMatrix(numeric.to_numpy(dtype=float), labels=labels)


def read_data_csv(path, delimiter: str = ',') -> DataMatrix:
    """读取观测矩阵 CSV"""
    frame = read_frame(path, delimiter=delimiter)
    return frame_to_matrix(frame, source=str(path))
