"""
管理命令：容许限基线
使用方法：python manage.py tolerance data.csv --beta 0.9 --confidence 0.95 [--region]
"""
import numpy as np

from core_stats.services.ingest import read_data_csv
from meshes.services.export import write_json
from tolerance.services.limits import simultaneous_upper_tolerance, univariate_upper_tolerances
from tolerance.services.region import elliptical_tolerance_region
from utils.commands import AnalysisCommand


class Command(AnalysisCommand):
    help = '逐列单变量容许上限、Bonferroni 同时容许上限，以及可选的椭圆容许域'
    stem = 'tolerance'
    casts = {'beta': float, 'confidence': float, 'n_mc': int}

    def add_command_arguments(self, parser):
        parser.add_argument('data', help='观测矩阵 CSV（每行一个样本）')
        parser.add_argument('--beta', type=float, help='覆盖比例 β（缺省 0.9）')
        parser.add_argument('--confidence', type=float, help='置信度（缺省 0.95）')
        parser.add_argument('--region', action='store_true', default=None, help='同时计算椭圆容许域')
        parser.add_argument('--n-mc', type=int, help='椭圆容许域因子的蒙特卡洛次数（缺省 100000）')

    def run(self, options):
        data = read_data_csv(options['data'])
        beta = options['beta'] or 0.9
        confidence = options['confidence'] or 0.95
        options['beta'], options['confidence'] = beta, confidence
        labels = data.column_labels()
        univariate = univariate_upper_tolerances(data, beta, confidence)
        bonferroni = simultaneous_upper_tolerance(data, beta, confidence)
        payload = {
            'beta': beta,
            'confidence': confidence,
            'labels': list(labels),
            'univariate': univariate,
            'bonferroni': bonferroni,
        }
        for label, u, s in zip(labels, univariate, bonferroni):
            self.stdout.write(f'{label}: 单变量 {u:.4f}  Bonferroni {s:.4f}')
        if options['region']:
            region = elliptical_tolerance_region(data, beta, confidence, n_mc=options['n_mc'] or 100_000,
                                                 seed=options['seed'])
            payload['region'] = region.as_dict()
            if region.boundary is not None:
                payload['region']['boundary'] = np.asarray(region.boundary.vertices)
            self.stdout.write(f'椭圆容许域因子 r = {region.r:.4f}')
        path = write_json(options['out_dir'] / f'{self.stem}.json', payload)
        return {'file': str(path)}
