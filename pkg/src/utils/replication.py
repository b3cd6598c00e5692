from concurrent.futures import ThreadPoolExecutor
import os
from typing import Callable, List, Optional, TypeVar

import numpy as np

from src.core.logger import get_logger
from src.core.settings import SETTINGS

logger = get_logger(__name__)

T = TypeVar('T')

def replication_seed(master_seed: int, index: int) -> int:
    """
    Seed of replication `index`, a child stream of the master seed.

    Args:
        master_seed: Nonnegative experiment seed
        index: Replication index

    Returns:
        int: 64-bit seed independent of the thread schedule
    """
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(sequence.generate_state(1, np.uint64)[0])

def default_thread_count() -> int:
    """LIL_LAB_THREADS if set, else concurrency.max_workers."""
    env = os.getenv('LIL_LAB_THREADS')
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning(f"Ignoring non-integer LIL_LAB_THREADS={env!r}")
    return int(SETTINGS['concurrency']['max_workers'])

def run_replications(task: Callable[[int, int], T],
                     replications: int,
                     master_seed: int,
                     threads: Optional[int] = None) -> List[T]:
    """
    Run task(index, seed) for every replication, ordered by index.

    Tasks share no mutable state; the result list does not depend on the
    thread count.
    """
    threads = threads or default_thread_count()
    seeds = [replication_seed(master_seed, index) for index in range(replications)]
    if threads == 1 or replications == 1:
        return [task(index, seed) for index, seed in enumerate(seeds)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(task, range(replications), seeds))
