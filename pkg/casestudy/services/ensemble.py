"""
SRS 数据集读取

长表 CSV：frequency, sample_id, axis, value（表头必需）；
或一个目录，每个频率一个 CSV，文件名即频率（如 200.24.csv），内容为 n×q 观测矩阵。
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from core_stats.services.ingest import read_data_csv
from core_stats.services.matrices import DataMatrix
from utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

LONG_COLUMNS = ('frequency', 'sample_id', 'axis', 'value')


@dataclass(frozen=True)
class SrsEnsemble:
    frequencies: tuple
    matrices: tuple
    labels: tuple

    def __post_init__(self):
        frequencies = tuple(float(f) for f in self.frequencies)
        if not frequencies:
            raise InvalidInputError('SRS 数据集为空')
        if len(frequencies) != len(self.matrices):
            raise InvalidInputError('频率个数与样本矩阵个数不一致')
        if any(b <= a for a, b in zip(frequencies, frequencies[1:])):
            raise InvalidInputError('频率必须严格递增')
        shapes = {(m.n, m.q) for m in self.matrices}
        if len(shapes) != 1:
            raise InvalidInputError(f'各频率的样本矩阵形状不一致: {sorted(shapes)}')
        labels = tuple(str(label) for label in self.labels)
        if len(labels) != self.q:
            raise InvalidInputError('轴标签个数与变量个数不一致')
        object.__setattr__(self, 'frequencies', frequencies)
        object.__setattr__(self, 'matrices', tuple(self.matrices))
        object.__setattr__(self, 'labels', labels)

    @property
    def n(self) -> int:
        return self.matrices[0].n

    @property
    def q(self) -> int:
        return self.matrices[0].q

    def __len__(self) -> int:
        return len(self.frequencies)

    def items(self):
        return zip(self.frequencies, self.matrices)


def read_long_csv(path) -> SrsEnsemble:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f'输入文件不存在: {path}')
    try:
        frame = pd.read_csv(path, skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise InvalidInputError(f'CSV 解析失败 {path}: {exc}') from exc
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = [c for c in LONG_COLUMNS if c not in frame.columns]
    if missing:
        raise InvalidInputError(f'{path} 缺少列: {missing}')
    frame['frequency'] = pd.to_numeric(frame['frequency'], errors='coerce')
    frame['value'] = pd.to_numeric(frame['value'], errors='coerce')
    bad = frame[['frequency', 'value']].isna().any(axis=1).to_numpy()
    if bad.any():
        # 表头占第 1 行
        raise InvalidInputError(f'{path} 第 {int(np.argmax(bad)) + 2} 行包含无法解析的数值')
    frame['axis'] = frame['axis'].astype(str).str.strip()
    labels = tuple(dict.fromkeys(frame['axis']))

    frequencies, matrices = [], []
    for frequency, group in frame.groupby('frequency', sort=True):
        if group.duplicated(['sample_id', 'axis']).any():
            raise InvalidInputError(f'{frequency} Hz 存在重复的 (sample_id, axis)')
        wide = group.pivot(index='sample_id', columns='axis', values='value').reindex(columns=list(labels))
        if wide.isna().any().any():
            raise InvalidInputError(f'{frequency} Hz 的部分样本缺少某些轴的数值')
        frequencies.append(float(frequency))
        matrices.append(DataMatrix(wide.to_numpy(dtype=float), labels=labels))
    logger.info(f'读取 {path}: {len(frequencies)} 个频率, 轴 {labels}')
    return SrsEnsemble(tuple(frequencies), tuple(matrices), labels)


def read_directory(path) -> SrsEnsemble:
    path = Path(path)
    entries = []
    for file in sorted(path.glob('*.csv')):
        try:
            frequency = float(file.stem)
        except ValueError:
            logger.warning(f'跳过无法识别频率的文件: {file.name}')
            continue
        entries.append((frequency, read_data_csv(file)))
    if not entries:
        raise InvalidInputError(f'{path} 中没有按频率命名的 CSV 文件')
    entries.sort(key=lambda item: item[0])
    labels = entries[0][1].column_labels()
    return SrsEnsemble(tuple(f for f, _ in entries), tuple(m for _, m in entries), labels)


def load_ensemble(path) -> SrsEnsemble:
    path = Path(path)
    if path.is_dir():
        return read_directory(path)
    return read_long_csv(path)
