"""
随机数工具

所有随机性都来自显式种子：np.random.Generator(PCG64)，
子任务种子由 SeedSequence.spawn 派生，保证并行结果与执行顺序无关。
"""
import secrets

import numpy as np

SEED_BITS = 63


def draw_system_seed() -> int:
    """未指定 --seed 时从系统熵源取一个种子（会记录到清单中）"""
    return secrets.randbits(SEED_BITS)


def make_rng(seed=None) -> np.random.Generator:
    """seed 可以是整数、SeedSequence 或已有的 Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if seed is None:
        seed = draw_system_seed()
    return np.random.Generator(np.random.PCG64(int(seed)))


def spawn_seeds(seed, count: int) -> list:
    """由 (seed, 序号) 派生 count 个互相独立的子种子"""
    if isinstance(seed, np.random.SeedSequence):
        parent = seed
    else:
        parent = np.random.SeedSequence(int(seed))
    return parent.spawn(int(count))


def seed_to_int(seed) -> int:
    """把 SeedSequence 折叠成整数，便于写入结果清单"""
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))
    return int(seed)
