"""
管理命令：算法覆盖率的蒙特卡洛验证研究
使用方法：python manage.py simulate --study alg3 --preset desk --threads 0
"""
from simulation.services.config import PRESETS, STUDIES, StudyConfig
from simulation.services.reports import write_study_outputs
from simulation.services.studies import run_study
from utils.commands import AnalysisCommand


class Command(AnalysisCommand):
    help = '按预设（smoke / desk / full）运行 alg1 / alg2 / alg3 覆盖率研究，输出结果表 CSV 与清单'
    stem = 'simulate'
    default_ci_method = 'bca'
    casts = {'mc_trials': int, 'n_mc_beta': int}

    def add_command_arguments(self, parser):
        parser.add_argument('--study', choices=STUDIES, required=True, help='研究类型')
        parser.add_argument('--preset', choices=tuple(PRESETS), help='参数网格预设（缺省 desk）')
        parser.add_argument('--mc-trials', type=int, help='每个参数单元的试验次数（覆盖预设）')
        parser.add_argument('--n-mc-beta', type=int, help='alg2 真实覆盖率使用的共享样本数')

    def run(self, options):
        preset = options['preset'] or 'desk'
        options['preset'] = preset
        config = StudyConfig.from_preset(
            options['study'], preset,
            mc_trials=options['mc_trials'],
            n_mc_beta=options['n_mc_beta'],
            # 未显式给出 --b 时沿用预设
            b=options['b'] if 'b' in self.explicit else None,
            ci_method=options['ci_method'],
            style=options['style'],
            grid_step=options['grid_step'],
            interpolate=options['interpolate'],
            seed=options['seed'],
            n_jobs=self.bootstrap_config(options).n_jobs,
        )
        self.stdout.write(f'{config.study} / {preset}: {config.mc_trials} 次试验，b={config.bootstrap.b}')
        result = run_study(config)
        files = write_study_outputs(result, options['out_dir'], stem=f'study_{config.study}_{preset}')
        self.stdout.write(result.table.to_string(index=False))
        return {'grand_mean_p': result.grand_mean, 'files': {k: str(v) for k, v in files.items()}}
