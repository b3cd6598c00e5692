from .terms import (
    DecompositionTerm,
    zero_axes,
    coboundary_block,
    martingale_block,
    listing_block,
    d_kI,
    all_terms,
    u_k,
    d_k
)
from .inequality import (
    InequalityPlan,
    PointwiseCheck,
    inequality_plan,
    required_margin,
    max_partial_sum,
    verify_pointwise_inequality,
    dim1_listed_margin,
    verify_dim1_listed_inequality
)
from .series import (
    CombinationLaw,
    MWSeries,
    combination_law,
    coefficient_part,
    mw_series,
    hannan_series
)

__all__ = [
    'DecompositionTerm',
    'zero_axes',
    'coboundary_block',
    'martingale_block',
    'listing_block',
    'd_kI',
    'all_terms',
    'u_k',
    'd_k',
    'InequalityPlan',
    'PointwiseCheck',
    'inequality_plan',
    'required_margin',
    'max_partial_sum',
    'verify_pointwise_inequality',
    'dim1_listed_margin',
    'verify_dim1_listed_inequality',
    'CombinationLaw',
    'MWSeries',
    'combination_law',
    'coefficient_part',
    'mw_series',
    'hannan_series'
]
