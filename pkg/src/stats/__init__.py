from .laws import DiscreteLaw, stress_family
from .norms import (
    OrliczParams,
    NormEstimate,
    WeakLpNorms,
    phi,
    lp_norm,
    orlicz_norm,
    weak_lp_norms,
    empirical_lp_norm,
    empirical_orlicz_norm
)
from .lemmas import (
    PairedLaw,
    doob_pair,
    check_orlicz_power_lemma,
    check_orlicz_scaling_lemma,
    check_series_lemma,
    check_weak_type_estimate,
    check_weak_type_to_orlicz,
    weak_type_hypothesis_holds
)

__all__ = [
    'DiscreteLaw',
    'stress_family',
    'OrliczParams',
    'NormEstimate',
    'WeakLpNorms',
    'phi',
    'lp_norm',
    'orlicz_norm',
    'weak_lp_norms',
    'empirical_lp_norm',
    'empirical_orlicz_norm',
    'PairedLaw',
    'doob_pair',
    'check_orlicz_power_lemma',
    'check_orlicz_scaling_lemma',
    'check_series_lemma',
    'check_weak_type_estimate',
    'check_weak_type_to_orlicz',
    'weak_type_hypothesis_holds'
]
