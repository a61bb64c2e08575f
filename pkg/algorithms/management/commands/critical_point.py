"""
管理命令：临界点的自助法置信限
使用方法：python manage.py critical_point data.csv --tau 0.9 --gamma 0.95 --ci-method bca --b 2000
"""
from algorithms.services.critical_point_ci import algorithm3_critical_point_ci
from bootstrap.services.config import PercentileRequest
from core_stats.services.ingest import read_data_csv
from meshes.services.export import write_json
from utils.commands import AnalysisCommand, float_list


class Command(AnalysisCommand):
    help = '标准化等坐标分位点（临界点）在原始域中的置信限'
    stem = 'critical_point'
    casts = {'tau': float}

    def add_command_arguments(self, parser):
        parser.add_argument('data', help='观测矩阵 CSV（每行一个样本）')
        parser.add_argument('--tau', type=float, help='分位概率 τ（缺省 0.9）')
        parser.add_argument('--gamma', type=float, action='append', help='百分位水平，可重复（缺省 0.95）')

    def run(self, options):
        data = read_data_csv(options['data'])
        tau = options['tau'] or 0.9
        request = PercentileRequest.of(float_list(options['gamma'], (0.95,)))
        options['tau'], options['gamma'] = tau, list(request.gammas)
        result = algorithm3_critical_point_ci(data, tau, request, self.bootstrap_config(options))
        path = write_json(options['out_dir'] / f'{self.stem}.json', result.as_dict())
        for gamma in result.gammas:
            point = ', '.join(f'{v:.4f}' for v in result.point(gamma))
            self.stdout.write(f'γ={gamma}: ({point})')
        return {'file': str(path), 'fallback': result.fallback}
