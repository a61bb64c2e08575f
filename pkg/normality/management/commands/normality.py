"""
管理命令：多元正态性诊断
使用方法：python manage.py normality data.csv --confidence 0.95 --n-mc 10000
"""
import pandas as pd

from core_stats.services.ingest import read_data_csv
from meshes.services.export import write_json
from normality.services.report import normality_report
from utils.commands import AnalysisCommand


class Command(AnalysisCommand):
    help = '马氏距离平方的 AD / KS 检验与 χ² QQ 图蒙特卡洛包络'
    stem = 'normality'
    casts = {'confidence': float, 'n_mc': int, 'alpha': float}

    def add_command_arguments(self, parser):
        parser.add_argument('data', help='观测矩阵 CSV（每行一个样本）')
        parser.add_argument('--confidence', type=float, help='QQ 包络置信度（缺省 0.95）')
        parser.add_argument('--n-mc', type=int, help='包络模拟次数（缺省 10000）')
        parser.add_argument('--alpha', type=float, help='检验显著性水平（缺省 0.05）')

    def run(self, options):
        data = read_data_csv(options['data'])
        options['confidence'] = options['confidence'] or 0.95
        options['n_mc'] = options['n_mc'] or 10_000
        options['alpha'] = options['alpha'] or 0.05
        report = normality_report(data, confidence=options['confidence'], n_mc=options['n_mc'],
                                  seed=options['seed'], alpha=options['alpha'])
        out_dir = options['out_dir']
        path = write_json(out_dir / f'{self.stem}.json', report.as_dict())
        qq = pd.DataFrame(report.envelope.as_dict()['rows'])
        qq['observed'] = sorted(report.distances)
        qq.to_csv(out_dir / f'{self.stem}_qq.csv', index=False)
        style = self.style.SUCCESS if report.passed else self.style.WARNING
        self.stdout.write(style(f'AD p={report.ad_p:.4f}  KS p={report.ks_p:.4f}  QQ 包络内: {report.qq_pass}'))
        return {'file': str(path), 'passed': report.passed}
