"""
管理命令：多轴冲击环境规范
使用方法：python manage.py casestudy [--data srs_long.csv | --data srs_dir/] --tau 0.9 --confidence 0.95
不给 --data 时使用内置的 200.24 Hz 数据。
"""
from casestudy.services.ensemble import load_ensemble
from casestudy.services.fixtures import fixture_ensemble
from casestudy.services.specification import run_case_study, write_specification
from utils.commands import AnalysisCommand


class Command(AnalysisCommand):
    help = '逐频率计算临界点置信限、单变量与 Bonferroni 容许上限和正态性诊断，输出规范表'
    stem = 'casestudy'
    default_ci_method = 'bca'
    casts = {'tau': float, 'confidence': float}

    def add_command_arguments(self, parser):
        parser.add_argument('--data', help='长表 CSV（frequency, sample_id, axis, value）或按频率命名的 CSV 目录')
        parser.add_argument('--tau', type=float, help='分位概率 τ（缺省 0.9）')
        parser.add_argument('--confidence', type=float, help='单侧置信度（缺省 0.95）')

    def run(self, options):
        ensemble = load_ensemble(options['data']) if options['data'] else fixture_ensemble()
        options['tau'] = options['tau'] or 0.9
        options['confidence'] = options['confidence'] or 0.95
        lines = run_case_study(ensemble, options['tau'], options['confidence'], self.bootstrap_config(options))
        files = write_specification(lines, options['out_dir'], stem='specification')
        for line in lines:
            if not line.ok:
                self.stdout.write(self.style.ERROR(f'{line.frequency} Hz: {line.error}'))
                continue
            point = ', '.join(f'{v:.4f}' for v in line.critical_point_ci)
            self.stdout.write(f'{line.frequency} Hz: 临界点上限 ({point})  τ_J={line.tau_joint:.4f}')
        return {
            'frequencies': len(lines),
            'failed': sum(not line.ok for line in lines),
            'files': {k: str(v) for k, v in files.items()},
        }
