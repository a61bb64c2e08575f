"""
分析类管理命令的公共基类

共享参数：--seed --b --style --ci-method --grid-step --interpolate --out-dir --config --threads。
取值优先级：命令行参数 > --config 指定的配置文件 > settings.QUANTILE 默认值。
配置文件可以是 key=value 文件，也可以是命令写出的 JSON 清单（取其中的 config 段）。
每次运行都在输出目录写一份清单：完整配置、软件版本、用时和实际使用的种子。
"""
import argparse
import json
import logging
import platform
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from decouple import Config, RepositoryEnv
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from threadpoolctl import threadpool_limits

from bootstrap.services.config import CI_METHODS, CI_METHOD_ALIASES, STYLES, BootstrapConfig, threads_to_jobs
from meshes.services.export import write_json
from utils.exceptions import QuantileError
from utils.rng import draw_system_seed

logger = logging.getLogger(__name__)

PACKAGES = ('numpy', 'scipy', 'pandas', 'joblib', 'Django')
DJANGO_OPTIONS = frozenset(('config', 'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
                            'force_color', 'skip_checks', 'stdout', 'stderr'))


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


CASTS = {'seed': int, 'b': int, 'threads': int, 'grid_step': float, 'interpolate': _to_bool}


def package_versions() -> dict:
    versions = {'python': platform.python_version()}
    for name in PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = None
    return versions


class ConfigFile:
    """--config 文件的只读视图"""

    def __init__(self, path=None):
        self.path = path
        self._json = None
        self._env = None
        if path is None:
            return
        path = Path(path)
        if not path.is_file():
            raise CommandError(f'配置文件不存在: {path}', returncode=2)
        if path.suffix.lower() == '.json':
            try:
                payload = json.loads(path.read_text(encoding='utf-8'))
            except json.JSONDecodeError as exc:
                raise CommandError(f'配置文件不是合法 JSON: {exc}', returncode=2) from exc
            self._json = payload.get('config', payload)
        else:
            self._env = Config(RepositoryEnv(str(path)))

    def get(self, name: str, default=None):
        if self._json is not None:
            return self._json.get(name, default)
        if self._env is not None:
            return self._env(name, default=default)
        return default


class AnalysisCommand(BaseCommand):
    """子类实现 add_command_arguments 与 run(options)；run 返回写入清单的结果摘要"""
    stem = 'result'
    # 命令自有参数从 key=value 文件读取时的类型转换
    casts = {}
    default_ci_method = 'percentile'

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, help='随机种子；缺省时从系统抽取并写入清单')
        parser.add_argument('--b', type=int, help='自助法重复次数（缺省取 QUANTILE_BOOTSTRAP_B）')
        parser.add_argument('--style', choices=STYLES, help='重抽样方式')
        parser.add_argument('--ci-method', choices=CI_METHODS + tuple(CI_METHOD_ALIASES),
                            help='置信区间方法：percentile / bc / bca')
        parser.add_argument('--grid-step', type=float, help='标准化域网格步长')
        parser.add_argument('--interpolate', action=argparse.BooleanOptionalAction, default=None,
                            help='提取前对网格做三次上采样（--no-interpolate 关闭）')
        parser.add_argument('--out-dir', help='输出目录（缺省取 QUANTILE_OUT_DIR）')
        parser.add_argument('--config', help='key=value 配置文件或此前运行写出的 JSON 清单')
        parser.add_argument('--threads', type=int, help='并行线程上限，0 表示全部 CPU 核')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, options: dict) -> dict:
        raise NotImplementedError

    def resolve(self, options: dict, name: str, default=None):
        """命令行 > 配置文件 > default"""
        value = options.get(name)
        if value is not None:
            return value
        value = self.config_file.get(name)
        if value is None:
            return default
        cast = self.casts.get(name) or CASTS.get(name)
        return cast(value) if cast else value

    def bootstrap_config(self, options: dict) -> BootstrapConfig:
        return BootstrapConfig.from_settings(
            b=options['b'],
            style=options['style'],
            ci_method=options['ci_method'],
            seed=options['seed'],
            n_jobs=threads_to_jobs(options['threads']),
        )

    def handle(self, *args, **options):
        self.config_file = ConfigFile(options.get('config'))
        conf = getattr(settings, 'QUANTILE', {})
        for name in options:
            if name in DJANGO_OPTIONS:
                continue
            options[name] = self.resolve(options, name)
        # 用户（命令行或配置文件）显式给出的参数
        self.explicit = {name for name, value in options.items()
                         if value is not None and name not in DJANGO_OPTIONS}
        options['seed'] = draw_system_seed() if options['seed'] is None else int(options['seed'])
        options['b'] = options['b'] or conf.get('BOOTSTRAP_B', 1000)
        options['style'] = options['style'] or 'nonparametric'
        options['ci_method'] = options['ci_method'] or self.default_ci_method
        options['threads'] = conf.get('THREADS', 0) if options['threads'] is None else int(options['threads'])
        options['interpolate'] = True if options['interpolate'] is None else _to_bool(options['interpolate'])
        options['out_dir'] = Path(options['out_dir'] or conf.get('OUT_DIR', 'output'))

        started = time.perf_counter()
        try:
            with threadpool_limits(limits=options['threads'] or None):
                summary = self.run(options)
        except QuantileError as exc:
            logger.error(f'{self.stem}: {exc}')
            raise CommandError(str(exc), returncode=exc.exit_code) from exc
        duration = time.perf_counter() - started

        manifest = {
            'command': self.stem,
            'config': self.config_echo(options),
            'seed': options['seed'],
            'versions': package_versions(),
            'duration_seconds': round(duration, 3),
            'result': summary,
        }
        path = write_json(options['out_dir'] / f'{self.stem}_manifest.json', manifest)
        self.stdout.write(self.style.SUCCESS(f'完成，用时 {duration:.1f}s，清单: {path}'))

    @staticmethod
    def config_echo(options: dict) -> dict:
        return {k: (str(v) if isinstance(v, Path) else v) for k, v in options.items() if k not in DJANGO_OPTIONS}


def float_list(value, default=()) -> tuple:
    """--gamma 等可重复参数：列表、逗号分隔字符串或单个数"""
    if value is None:
        return tuple(default)
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, str):
        return tuple(float(v) for v in value.split(',') if v.strip())
    return tuple(float(v) for v in value)
