import math
from typing import Optional, Sequence

from src.core.settings import SETTINGS

FLOAT_FORMAT = SETTINGS['report']['float_format']

def format_time_delta(seconds: float) -> str:
    """
    Format a time delta into a human-readable string.

    Args:
        seconds: Number of seconds

    Returns:
        str: Formatted string like 'DD:HH:MM:SS.mmm'
    """
    days = int(seconds // 86400)
    hours = int((seconds % 86400) // 3600)
    minutes = int((seconds % 3600) // 60)
    secs = int(seconds % 60)
    msecs = int((seconds * 1000) % 1000)

    return f"{days:02d}:{hours:02d}:{minutes:02d}:{secs:02d}.{msecs:03d}"

def format_window(sizes: Sequence[int]) -> str:
    """Window sizes as '64' or '16x16'."""
    return 'x'.join(str(int(s)) for s in sizes)

def format_float(value: Optional[float]) -> str:
    """
    Render a report number so that equal floats give equal text.

    Args:
        value: Number or None

    Returns:
        str: '' for None, 'inf'/'-inf'/'nan' for non-finite values, else the
            configured round-trip format
    """
    if value is None:
        return ''
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return format(value, FLOAT_FORMAT)

def format_verdict(tag: str, status: str, detail: str) -> str:
    """Verdict line understood by the console formatter: '[tag] STATUS detail'."""
    return f"[{tag}] {status} {detail}"
