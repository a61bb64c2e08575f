"""
研究配置与预设
"""
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from bootstrap.services.config import BootstrapConfig
from utils.exceptions import InvalidInputError
from utils.rng import draw_system_seed

STUDIES = ('alg1', 'alg2', 'alg3')
MIN_TRIALS = 10

# 各研究的默认单侧/双侧 γ
DEFAULT_GAMMAS = {'alg1': (0.025, 0.975), 'alg2': (0.95,), 'alg3': (0.95,)}

PRESETS = {
    'smoke': {
        'alg1': dict(q_list=(2,), n_list=(30,), tau_list=(0.9,), mc_trials=10, b=100),
        'alg2': dict(rho_list=(0.0,), tau_list=(0.9,), n_list=(30,), mc_trials=10, b=100, grid_step=0.1,
                     n_mc_beta=10_000),
        'alg3': dict(q_list=(2,), n_list=(30,), tau_list=(0.9,), mc_trials=10, b=100),
    },
    'desk': {
        'alg1': dict(q_list=(3,), n_list=(300,), tau_list=(0.9,), mc_trials=100, b=500),
        'alg2': dict(rho_list=(-0.9, 0.0, 0.9), tau_list=(0.9,), n_list=(30,), mc_trials=50, b=300,
                     grid_step=0.05),
        'alg3': dict(q_list=(2, 3), n_list=(30,), tau_list=(0.9,), mc_trials=100, b=500),
    },
    'full': {
        'alg1': dict(q_list=(2, 3, 4), n_list=(30, 300, 3000), tau_list=(0.9,), mc_trials=100, b=1000),
        'alg2': dict(rho_list=(-0.9, 0.0, 0.9), tau_list=(0.7, 0.8, 0.9), n_list=(30, 300), mc_trials=250,
                     b=1000, grid_step=0.01),
        'alg3': dict(q_list=(2, 3, 4), n_list=(30, 300), tau_list=(0.7, 0.8, 0.9), mc_trials=250, b=1000),
    },
}


@dataclass(frozen=True)
class StudyConfig:
    study: str
    q_list: tuple = (2,)
    n_list: tuple = (30,)
    tau_list: tuple = (0.9,)
    rho_list: tuple = (0.0,)
    mc_trials: int = 50
    bootstrap: BootstrapConfig = field(default_factory=lambda: BootstrapConfig(b=200, ci_method='bca', seed=0))
    cvine_c: float = 2.0
    seed: Optional[int] = None
    gammas: tuple = ()
    grid_step: float = 0.05
    interpolate: bool = True
    n_mc_beta: int = 100_000
    cdf_abs_tol: float = 1e-4
    n_jobs: int = 1

    def __post_init__(self):
        if self.study not in STUDIES:
            raise InvalidInputError(f'未知的研究: {self.study}，可选 {STUDIES}')
        if int(self.mc_trials) < MIN_TRIALS:
            raise InvalidInputError(f'mc_trials 至少为 {MIN_TRIALS}，当前 {self.mc_trials}')
        for name in ('q_list', 'n_list', 'tau_list', 'rho_list'):
            values = tuple(getattr(self, name))
            if not values:
                raise InvalidInputError(f'{name} 不能为空')
            object.__setattr__(self, name, values)
        if self.study == 'alg2' and tuple(self.q_list) != (2,):
            object.__setattr__(self, 'q_list', (2,))
        object.__setattr__(self, 'mc_trials', int(self.mc_trials))
        object.__setattr__(self, 'gammas', tuple(self.gammas) or DEFAULT_GAMMAS[self.study])
        object.__setattr__(self, 'seed', draw_system_seed() if self.seed is None else int(self.seed))

    @classmethod
    def from_preset(cls, study: str, preset: str, **overrides) -> 'StudyConfig':
        if preset not in PRESETS:
            raise InvalidInputError(f'未知的预设: {preset}，可选 {tuple(PRESETS)}')
        if study not in STUDIES:
            raise InvalidInputError(f'未知的研究: {study}，可选 {STUDIES}')
        values = dict(PRESETS[preset][study])
        values.update({k: v for k, v in overrides.items() if v is not None})
        b = values.pop('b', 200)
        ci_method = values.pop('ci_method', 'bca')
        style = values.pop('style', 'nonparametric')
        values['bootstrap'] = BootstrapConfig(b=b, ci_method=ci_method, style=style, seed=0)
        return cls(study=study, **values)

    def trial_bootstrap(self, seed: int) -> BootstrapConfig:
        """试验内部串行执行自助法，并行放在试验层"""
        return replace(self.bootstrap, seed=int(seed), n_jobs=1)

    def as_dict(self) -> dict:
        values = asdict(self)
        values['bootstrap'] = self.bootstrap.as_dict()
        return values
