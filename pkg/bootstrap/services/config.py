"""
自助法配置
"""
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from django.conf import settings

from utils.exceptions import InvalidInputError
from utils.rng import draw_system_seed

STYLES = ('parametric', 'nonparametric')
CI_METHODS = ('percentile', 'bias_corrected', 'bca')
# 命令行里的简写
CI_METHOD_ALIASES = {'bc': 'bias_corrected'}
MIN_B = 100
GAMMA_DIGITS = 12


def normalize_ci_method(method: str) -> str:
    method = CI_METHOD_ALIASES.get(method, method)
    if method not in CI_METHODS:
        raise InvalidInputError(f'未知的置信区间方法: {method}')
    return method


@dataclass(frozen=True)
class BootstrapConfig:
    b: int = 1000
    style: str = 'nonparametric'
    ci_method: str = 'percentile'
    seed: Optional[int] = None
    n_jobs: int = 1

    def __post_init__(self):
        if int(self.b) < MIN_B:
            raise InvalidInputError(f'自助法重复次数 b 至少为 {MIN_B}，当前 {self.b}')
        object.__setattr__(self, 'b', int(self.b))
        if self.style not in STYLES:
            raise InvalidInputError(f'未知的重抽样方式: {self.style}')
        object.__setattr__(self, 'ci_method', normalize_ci_method(self.ci_method))
        # 未给种子时从系统取一个，并留在配置里供结果清单记录
        seed = draw_system_seed() if self.seed is None else int(self.seed)
        object.__setattr__(self, 'seed', seed)

    @classmethod
    def from_settings(cls, **overrides) -> 'BootstrapConfig':
        options = getattr(settings, 'QUANTILE', {})
        values = {'b': options.get('BOOTSTRAP_B', 1000), 'n_jobs': threads_to_jobs(options.get('THREADS', 0))}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def as_dict(self) -> dict:
        return asdict(self)


def threads_to_jobs(threads: int) -> int:
    """0 表示使用全部核心（joblib 的 -1）"""
    threads = int(threads or 0)
    return -1 if threads <= 0 else threads


@dataclass(frozen=True)
class PercentileRequest:
    """需要的百分位 γ，构造时按升序排列"""
    gammas: tuple

    def __post_init__(self):
        # 去掉 1 − γ 产生的浮点残差
        gammas = tuple(sorted(round(float(g), GAMMA_DIGITS) for g in self.gammas))
        if not gammas:
            raise InvalidInputError('至少需要一个 γ')
        for g in gammas:
            if not 0.0 < g < 1.0:
                raise InvalidInputError(f'γ 必须在 (0, 1) 内，当前 {g}')
        object.__setattr__(self, 'gammas', gammas)

    @classmethod
    def of(cls, gammas: Sequence[float]) -> 'PercentileRequest':
        if isinstance(gammas, (int, float)):
            gammas = [gammas]
        return cls(tuple(gammas))

    @classmethod
    def two_sided(cls, confidence: float = 0.95) -> 'PercentileRequest':
        alpha = 1.0 - float(confidence)
        return cls((alpha / 2, 1.0 - alpha / 2))

    def __len__(self) -> int:
        return len(self.gammas)
