"""
重复样本的并行执行

每个任务拿到由 (seed, 序号) 派生的独立 SeedSequence，结果按任务序号返回，
因此并行与串行、不同线程数下的输出完全一致。
"""
import logging
from typing import Callable, Sequence

from joblib import Parallel, delayed
from tqdm import tqdm

from utils.rng import spawn_seeds

logger = logging.getLogger(__name__)


def run_tasks(func: Callable, tasks: Sequence, n_jobs: int = 1, desc: str = None) -> list:
    """按顺序返回 func(task) 的结果；n_jobs=-1 使用全部核心"""
    tasks = list(tasks)
    progress = tqdm(total=len(tasks), desc=desc, disable=None, leave=False)
    try:
        if n_jobs == 1 or len(tasks) <= 1:
            results = []
            for task in tasks:
                results.append(func(task))
                progress.update()
            return results
        results = []
        parallel = Parallel(n_jobs=n_jobs, return_as='generator')
        for result in parallel(delayed(func)(task) for task in tasks):
            results.append(result)
            progress.update()
        return results
    finally:
        progress.close()


def run_replicates(func: Callable, seed, count: int, n_jobs: int = 1, desc: str = None) -> list:
    """func(SeedSequence) 执行 count 次"""
    logger.debug(f'{desc or "replicates"}: {count} 个任务, n_jobs={n_jobs}')
    return run_tasks(func, spawn_seeds(seed, count), n_jobs=n_jobs, desc=desc)
