import itertools
from dataclasses import dataclass
from typing import AbstractSet, Optional, Union

import numpy as np

from src.core.error_handler import DomainError, ShapeMismatchError, WindowError
from src.core.logger import get_logger
from src.lattice.geometry import LatticeIndex, Window, as_index

logger = get_logger(__name__)

Number = Union[int, float]

INT64_MAX = int(np.iinfo(np.int64).max)

def inclusive_scan(values: np.ndarray, axis: int) -> np.ndarray:
    """
    Inclusive prefix sum along one axis by pairwise (Hillis-Steele) passes.

    Each output is a balanced tree of partial sums of depth log2(n), which
    keeps floating-point drift logarithmic in the axis length. Integer input
    is summed exactly.

    Args:
        values: Array to scan
        axis: Axis along which to accumulate

    Returns:
        np.ndarray: Scanned copy of the input
    """
    result = np.array(values, copy=True)
    length = result.shape[axis]
    offset = 1
    while offset < length:
        head = [slice(None)] * result.ndim
        tail = [slice(None)] * result.ndim
        head[axis] = slice(offset, None)
        tail[axis] = slice(None, length - offset)
        shifted = result[tuple(tail)].copy()
        result[tuple(head)] += shifted
        offset *= 2
    return result

@dataclass(frozen=True)
class PrefixSumTable:
    """
    Summed-area table of a field on a window.

    cumulative has shape sizes + 1; cumulative[i] is the sum of values over
    1 <= j <= i, so any index with a zero coordinate holds 0.
    """
    dims: Window
    cumulative: np.ndarray

    @property
    def exact(self) -> bool:
        """True when built from integer values (exact integer arithmetic)."""
        return np.issubdtype(self.cumulative.dtype, np.integer)

    @property
    def total(self) -> Number:
        return self._scalar(self.cumulative[tuple(self.dims.sizes)])

    def partial_sums(self) -> np.ndarray:
        """S_n for every 1 <= n <= sizes, indexed by n - 1."""
        return self.cumulative[(slice(1, None),) * self.dims.d]

    def _scalar(self, value) -> Number:
        return int(value) if self.exact else float(value)

def build_prefix_table(values: np.ndarray, window: Optional[Window] = None) -> PrefixSumTable:
    """
    Build the prefix-sum table of a dense field, one scan per axis.

    Args:
        values: Dense array of field values, values[n - 1] at position n
        window: Window the array lives on, defaults to one matching its shape

    Returns:
        PrefixSumTable: Immutable table with a zero boundary layer

    Raises:
        ShapeMismatchError: If the array shape differs from the window sizes
        DomainError: If integer values could overflow int64 partial sums
    """
    values = np.asarray(values)
    if window is None:
        window = Window(values.shape)
    if values.shape != tuple(window.sizes):
        raise ShapeMismatchError(
            f"Array of shape {values.shape} does not match window sizes {window.sizes}"
        )

    exact = np.issubdtype(values.dtype, np.integer) or values.dtype == bool
    dtype = np.int64 if exact else np.float64
    if exact and values.size:
        # every partial sum is bounded by max|v| times the window volume
        largest = max(abs(int(values.max())), abs(int(values.min())))
        if largest * values.size > INT64_MAX:
            raise DomainError(f"Integer field with |v| <= {largest} on {values.size} sites may overflow int64 sums")
    cumulative = np.zeros(tuple(s + 1 for s in window.sizes), dtype=dtype)
    scanned = values.astype(dtype)
    for axis in range(window.d):
        scanned = inclusive_scan(scanned, axis)
    cumulative[(slice(1, None),) * window.d] = scanned
    cumulative.setflags(write=False)
    return PrefixSumTable(dims=window, cumulative=cumulative)

def _check_position(table: PrefixSumTable, n: LatticeIndex, lower: int = 1):
    sizes = table.dims.sizes
    if len(n) != len(sizes) or any(not lower <= a <= s for a, s in zip(n, sizes)):
        raise WindowError(f"Index {tuple(n)} outside window of sizes {sizes}")

def rect_sum(table: PrefixSumTable, lo: LatticeIndex, hi: LatticeIndex) -> Number:
    """
    Sum of values over the rectangle lo <= n <= hi (1-based positions).

    Uses the 2^d-term inclusion-exclusion on the table corners.

    Raises:
        WindowError: If a corner is outside the window or lo is not <= hi
    """
    lo, hi = as_index(lo), as_index(hi)
    _check_position(table, lo)
    _check_position(table, hi)
    if any(a > b for a, b in zip(lo, hi)):
        raise WindowError(f"Empty rectangle: lo={lo} is not <= hi={hi}")

    total = 0
    d = table.dims.d
    for lowered in itertools.product((False, True), repeat=d):
        corner = tuple(a - 1 if low else b for a, b, low in zip(lo, hi, lowered))
        sign = -1 if sum(lowered) % 2 else 1
        total += sign * table._scalar(table.cumulative[corner])
    return table._scalar(total)

def directional_sum(table: PrefixSumTable, i: LatticeIndex, axes: AbstractSet[int]) -> Number:
    """
    S_i^I: sum over 0 <= j_q <= i_q - 1 on the axes of I, with j_q = i_q
    held fixed on the others.

    Coordinates are lattice offsets from the window origin, so the value at
    offset j sits at position j + 1. For I = all axes this is rect_sum(1, i);
    for I empty it is the single value at offset i.

    Args:
        table: Prefix table of the field
        i: Lattice offset
        axes: Subset I of {0, ..., d-1}

    Raises:
        WindowError: If an offset falls outside the window or I names a bad axis
    """
    i = as_index(i)
    sizes = table.dims.sizes
    if len(i) != len(sizes):
        raise WindowError(f"Index {i} does not match dimension {len(sizes)}")
    if any(q < 0 or q >= len(sizes) for q in axes):
        raise WindowError(f"Axis subset {sorted(axes)} is not inside [0, {len(sizes)})")

    lo, hi = [], []
    for q, (a, size) in enumerate(zip(i, sizes)):
        if q in axes:
            if not 1 <= a <= size:
                raise WindowError(f"Summation extent {a} on axis {q} outside [1, {size}]")
            lo.append(1)
            hi.append(a)
        else:
            if not 0 <= a <= size - 1:
                raise WindowError(f"Fixed offset {a} on axis {q} outside [0, {size - 1}]")
            lo.append(a + 1)
            hi.append(a + 1)
    return rect_sum(table, tuple(lo), tuple(hi))

def directional_sum_grid(table: PrefixSumTable, axes: AbstractSet[int]) -> np.ndarray:
    """
    S_i^I for every admissible i at once.

    The result has the window shape; along an axis of I entry a holds the
    extent i_q = a + 1, along the other axes entry a holds the offset i_q = a.
    """
    grid = table.cumulative
    for q in range(table.dims.d):
        if q in axes:
            index = [slice(None)] * grid.ndim
            index[q] = slice(1, None)
            grid = grid[tuple(index)]
        else:
            grid = np.diff(grid, axis=q)
    return grid
