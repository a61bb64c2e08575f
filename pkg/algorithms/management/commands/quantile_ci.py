"""
管理命令：CDF 分位数等值线 / 等值面的置信集合
使用方法：python manage.py quantile_ci data.csv --tau 0.9 --gamma 0.05 --gamma 0.95 --grid-step 0.05
"""
from algorithms.services.quantile_ci import algorithm2_quantile_ci
from bootstrap.services.config import PercentileRequest
from core_stats.services.ingest import read_data_csv
from meshes.services.export import export_quantile_set, write_json
from meshes.services.grid import GridSpec
from utils.commands import AnalysisCommand, float_list


class Command(AnalysisCommand):
    help = '二元等值线或三元等值面的自助法置信集合，输出顶点/拓扑 CSV、JSON 与 STL'
    stem = 'quantile_ci'
    casts = {'tau': float, 'max_cells': int}

    def add_command_arguments(self, parser):
        parser.add_argument('data', help='观测矩阵 CSV（2 或 3 列）')
        parser.add_argument('--tau', type=float, help='分位概率 τ（缺省 0.9）')
        parser.add_argument('--gamma', type=float, action='append', help='百分位水平，可重复（缺省 0.95）')
        parser.add_argument('--max-cells', type=int, help='单个网格张量的单元数上限')

    def run(self, options):
        data = read_data_csv(options['data'])
        tau = options['tau'] or 0.9
        request = PercentileRequest.of(float_list(options['gamma'], (0.95,)))
        options['tau'], options['gamma'] = tau, list(request.gammas)
        grid = GridSpec(q=data.q, step=options['grid_step'])
        result = algorithm2_quantile_ci(data, tau, request, self.bootstrap_config(options), grid=grid,
                                        interpolate=options['interpolate'], max_cells=options['max_cells'])
        files = {}
        for gamma in sorted(result.gamma_sets):
            stem = f'{self.stem}_g{gamma:g}'
            files[str(gamma)] = export_quantile_set(result.quantile_set(gamma), options['out_dir'], stem,
                                                    labels=result.labels)
            self.stdout.write(f'γ={gamma}: {result.quantile_set(gamma).vertices.shape[0]} 个顶点 → {stem}')
        path = write_json(options['out_dir'] / f'{self.stem}.json', result.as_dict())
        return {'file': str(path), 'sets': files, 'fallback_cells': result.fallback_cells}
