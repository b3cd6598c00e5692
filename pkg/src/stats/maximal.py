"""
Windowed maximal functions with LL normalization, their dyadic restrictions
and the auxiliary block statistics Y_n and Z_i.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.experiment_kinds import ZBlockVariant
from src.core.error_handler import DomainError, ExperimentError, WindowError
from src.core.logger import get_logger
from src.fields.models import FieldModel, render_sample
from src.lattice.geometry import (
    LatticeIndex,
    Window,
    as_index,
    dyadic_mask,
    is_power_of_two,
    lil_normalizer_grid,
    log_plus,
    ones,
)
from src.lattice.prefix_table import build_prefix_table, rect_sum
from src.utils.replication import run_replications

logger = get_logger(__name__)

@dataclass(frozen=True)
class MaximalResult:
    """max |S_n| / lil_normalizer(n) over n in N_restriction within the window."""
    value: float
    argmax: LatticeIndex
    window: Window
    restriction: int

def normalized_partial_sums(values: np.ndarray) -> np.ndarray:
    """|S_n| / lil_normalizer(n) for every position n, indexed by n - 1."""
    table = build_prefix_table(values)
    return np.abs(table.partial_sums()) / lil_normalizer_grid(table.dims.sizes)

def maximal_from_ratios(ratios: np.ndarray, restriction: int,
                        sizes: Optional[LatticeIndex] = None) -> Tuple[float, LatticeIndex]:
    """Maximum of a normalized-sum grid over N_restriction within the sub-window [1, sizes]."""
    sizes = as_index(sizes) if sizes is not None else ratios.shape
    block = ratios[tuple(slice(0, s) for s in sizes)]
    masked = np.where(dyadic_mask(sizes, restriction), block, -np.inf)
    flat = int(np.argmax(masked))
    position = np.unravel_index(flat, sizes)
    return float(block[position]), tuple(int(p) + 1 for p in position)

def maximal_function(sample, restriction: Optional[int] = None,
                     sizes: Optional[LatticeIndex] = None) -> MaximalResult:
    """
    Windowed maximal function of a rendered sample.

    Args:
        sample: FieldSample
        restriction: i in [0, d] selecting N_i, the full window (i = d) by default
        sizes: Optional sub-window [1, sizes] of the sample window

    Returns:
        MaximalResult: Value and the position attaining it
    """
    d = sample.window.d
    restriction = d if restriction is None else restriction
    if not 0 <= restriction <= d:
        raise DomainError(f"Restriction must lie in [0, {d}], got {restriction}")
    if sizes is not None and any(s > w or s < 1 for s, w in zip(sizes, sample.window.sizes)):
        raise WindowError(f"Sub-window {tuple(sizes)} exceeds the sample window {sample.window.sizes}")
    value, argmax = maximal_from_ratios(normalized_partial_sums(sample.values), restriction, sizes)
    window = sample.window if sizes is None else sample.window.enlarged(sizes)
    return MaximalResult(value, argmax, window, restriction)

def y_normalizer(exponents: LatticeIndex) -> float:
    """|2^n|^{1/2} prod_q L(max(n_q, 1))^{1/2}; L is evaluated at max(n_q, 1) to avoid L(0)."""
    return math.prod(math.sqrt(2.0 ** k * log_plus(max(k, 1))) for k in exponents)

def y_statistic(sample, n: LatticeIndex) -> float:
    """
    Y_n = |S_{2^n}(f)| / (|2^n|^{1/2} prod_q L(n_q)^{1/2}).

    Raises:
        WindowError: If the block 2^n does not fit in the window
    """
    n = as_index(n)
    if any(k < 0 for k in n):
        raise WindowError(f"Dyadic exponents must be nonnegative, got {n}")
    block = tuple(2 ** k for k in n)
    if not sample.window.contains(block):
        raise WindowError(f"Block {block} exceeds window {sample.window.sizes}")
    table = build_prefix_table(sample.values)
    return abs(rect_sum(table, ones(len(n)), block)) / y_normalizer(n)

def z_statistic(sample, axis: int, variant: ZBlockVariant = ZBlockVariant.LITERAL) -> float:
    """
    Z_i = sup over dyadic exponents n of Y_{n,i}.

    Y_{n,i} drops axis i from the normalization. The block on axis i is
    2^{n_i - (n_i - 1)} = 2 in the literal variant and 2^{n_i - n_i} = 1 in
    the matched variant; the other axes use 2^{n_q}.

    Raises:
        WindowError: If axis i is too short for its block
    """
    d = sample.window.d
    if not 0 <= axis < d:
        raise DomainError(f"Axis must lie in [0, {d}), got {axis}")
    axis_block = 2 if ZBlockVariant(variant) == ZBlockVariant.LITERAL else 1
    if sample.window.sizes[axis] < axis_block:
        raise WindowError(f"Axis {axis} of size {sample.window.sizes[axis]} cannot hold a block of {axis_block}")

    table = build_prefix_table(sample.values)
    exponent_ranges = [
        [0] if q == axis else range(size.bit_length())
        for q, size in enumerate(sample.window.sizes)
    ]
    best = 0.0
    for exponents in itertools.product(*exponent_ranges):
        block = tuple(axis_block if q == axis else 2 ** k for q, k in enumerate(exponents))
        others = tuple(k for q, k in enumerate(exponents) if q != axis)
        value = abs(rect_sum(table, ones(d), block)) / y_normalizer(others)
        best = max(best, value)
    return best

@dataclass(frozen=True)
class DyadicRatioTable:
    """Per-replication ratios M_full / M_dyadic (rows) for each window (columns)."""
    windows: Tuple[Window, ...]
    ratios: np.ndarray
    full: np.ndarray
    dyadic: np.ndarray

    @property
    def max_ratio(self) -> np.ndarray:
        return self.ratios.max(axis=0)

    def quantiles(self, levels: Sequence[float] = (0.5, 0.9, 0.99)) -> Dict[float, np.ndarray]:
        return {level: np.quantile(self.ratios, level, axis=0) for level in levels}

def dyadic_ratio(full: float, dyadic: float) -> float:
    """M_full / M_dyadic with the convention 0 / 0 = 1."""
    if full == 0 and dyadic == 0:
        return 1.0
    if dyadic == 0:
        return math.inf
    return full / dyadic

def dyadic_ratio_diagnostic(model: FieldModel,
                            windows: Sequence[Window],
                            replications: int,
                            seed: int,
                            threads: Optional[int] = None) -> DyadicRatioTable:
    """
    Ratio of the full maximal function to its fully dyadic restriction.

    Every replication renders one sample on the smallest window containing
    all requested windows and evaluates the nested sub-windows on it.

    Raises:
        DomainError: If a window is not dyadic
        ExperimentError: If M_dyadic exceeds M_full (set inclusion violated)
    """
    for window in windows:
        if not all(is_power_of_two(s) for s in window.sizes):
            raise DomainError(f"Window {window.sizes} is not dyadic")
    envelope = Window(tuple(max(w.sizes[q] for w in windows) for q in range(model.d)))

    def replicate(index: int, rep_seed: int) -> List[Tuple[float, float]]:
        sample = render_sample(model, envelope, rep_seed)
        ratios = normalized_partial_sums(sample.values)
        row = []
        for window in windows:
            full, _ = maximal_from_ratios(ratios, model.d, window.sizes)
            dyadic, _ = maximal_from_ratios(ratios, 0, window.sizes)
            if dyadic > full:
                raise ExperimentError(f"M_dyadic {dyadic} exceeds M_full {full} on window {window.sizes}")
            row.append((full, dyadic))
        return row

    rows = run_replications(replicate, replications, seed, threads)
    full = np.array([[cell[0] for cell in row] for row in rows])
    dyadic = np.array([[cell[1] for cell in row] for row in rows])
    ratios = np.vectorize(dyadic_ratio)(full, dyadic)
    logger.info(f"Dyadic ratio diagnostic over {replications} replications: max {ratios.max():.4f}")
    return DyadicRatioTable(tuple(windows), ratios, full, dyadic)
