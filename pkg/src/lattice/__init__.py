from .geometry import (
    LatticeIndex,
    Window,
    as_index,
    zeros,
    ones,
    unit_vector,
    precedes,
    lattice_min,
    lattice_add,
    lattice_sub,
    volume,
    powers_of_two,
    is_power_of_two,
    log_plus,
    ll,
    lil_normalizer,
    lil_normalizer_grid,
    dyadic_mask,
    dyadic_indices
)
from .prefix_table import (
    PrefixSumTable,
    build_prefix_table,
    rect_sum,
    directional_sum,
    directional_sum_grid,
    inclusive_scan
)

__all__ = [
    'LatticeIndex',
    'Window',
    'as_index',
    'zeros',
    'ones',
    'unit_vector',
    'precedes',
    'lattice_min',
    'lattice_add',
    'lattice_sub',
    'volume',
    'powers_of_two',
    'is_power_of_two',
    'log_plus',
    'll',
    'lil_normalizer',
    'lil_normalizer_grid',
    'dyadic_mask',
    'dyadic_indices',
    'PrefixSumTable',
    'build_prefix_table',
    'rect_sum',
    'directional_sum',
    'directional_sum_grid',
    'inclusive_scan'
]
