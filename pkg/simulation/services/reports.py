import logging
from pathlib import Path

from meshes.services.export import write_json
from simulation.services.studies import StudyResult

logger = logging.getLogger(__name__)


def write_study_outputs(result: StudyResult, out_dir, stem: str = None) -> dict:
    """结果表 CSV + 运行清单 JSON"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or f'study_{result.config.study}'
    table_path = out_dir / f'{stem}.csv'
    result.table.to_csv(table_path, index=False, float_format='%.4f')
    manifest_path = write_json(out_dir / f'{stem}_manifest.json', result.manifest())
    logger.info(f'研究结果已写入 {table_path}')
    return {'table': table_path, 'manifest': manifest_path}
