from .format import (
    format_time_delta,
    format_window,
    format_float,
    format_verdict
)
from .replication import (
    replication_seed,
    default_thread_count,
    run_replications
)

__all__ = [
    'format_time_delta',
    'format_window',
    'format_float',
    'format_verdict',
    'replication_seed',
    'default_thread_count',
    'run_replications'
]
