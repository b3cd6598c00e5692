import numpy as np
import pytest

from src.core.error_handler import ConfigError, DomainError
from src.stats.laws import DiscreteLaw, stress_family
from src.stats.lemmas import (
    PairedLaw,
    check_orlicz_power_lemma,
    check_orlicz_scaling_lemma,
    check_series_lemma,
    check_weak_type_estimate,
    check_weak_type_to_orlicz,
    doob_pair,
    weak_type_hypothesis_holds
)
from src.stats.norms import OrliczParams

class TestSeriesLemma:
    def test_constant_two_has_empty_sum(self):
        result = check_series_lemma(DiscreteLaw.constant(2.0), 2.0, 0.0, 12)
        assert result.lhs == 0.0
        assert result.passed

    def test_constant_above_first_threshold(self):
        result = check_series_lemma(DiscreteLaw.constant(2.5), 2.0, 0.0, 12)
        # only k = 1 contributes: 2^2 * P(X > 2)
        assert result.lhs == pytest.approx(4.0)
        assert result.rhs_bound == pytest.approx(2.0 / np.log(2.0) * 6.25 * np.log(2.5))
        assert result.passed
        assert result.companion_lhs == pytest.approx(6.0)
        assert result.companion_passed

    @pytest.mark.parametrize('law', stress_family(20), ids=lambda law: f'atoms{law.size}')
    def test_stress_family_scaled(self, law):
        result = check_series_lemma(law.scaled(4.0), 1.5, 1.0, 30)
        assert result.passed

    @pytest.mark.parametrize('p,q,k_max', [(0.5, 0.0, 4), (2.0, -1.0, 4), (2.0, 0.0, 0)])
    def test_domain(self, p, q, k_max):
        with pytest.raises(DomainError):
            check_series_lemma(DiscreteLaw.constant(2.0), p, q, k_max)

class TestWeakType:
    @pytest.mark.parametrize('n', [1, 2, 5, 8])
    def test_doob_pairs_satisfy_hypothesis(self, n):
        assert weak_type_hypothesis_holds(doob_pair(n))

    def test_constant_and_zero_pairs(self):
        assert weak_type_hypothesis_holds(PairedLaw((1.0,), (1.0,), (1.0,)))
        assert weak_type_hypothesis_holds(PairedLaw((0.0,), (0.0,), (1.0,)))

    def test_violating_pair_rejected(self):
        pair = PairedLaw((1.0,), (0.0,), (1.0,))
        assert not weak_type_hypothesis_holds(pair)
        with pytest.raises(ConfigError):
            check_weak_type_estimate(pair, [1.0])

    def test_estimate_on_doob_pair(self):
        t_grid = [2.0 ** k for k in range(-4, 5)]
        result = check_weak_type_estimate(doob_pair(8), t_grid)
        assert result.all_passed
        assert len(result.lhs) == len(t_grid)

    def test_grid_must_be_positive(self):
        with pytest.raises(DomainError):
            check_weak_type_estimate(doob_pair(2), [0.0])

    def test_malformed_pair(self):
        with pytest.raises(ConfigError):
            PairedLaw((1.0, 2.0), (1.0,), (1.0,))
        with pytest.raises(ConfigError):
            PairedLaw((-1.0,), (1.0,), (1.0,))

    def test_diagonal_orlicz_ratio_is_one(self):
        pairs = [PairedLaw.diagonal(law) for law in stress_family(10)]
        assert check_weak_type_to_orlicz(pairs, OrliczParams(2.0, 2.0)) == pytest.approx(1.0)

class TestOrliczComparisons:
    def test_power_lemma_finite(self):
        result = check_orlicz_power_lemma(stress_family(20), 2.0)
        assert result.finite
        assert len(result.square_ratios) == len(result.root_ratios) > 0
        assert result.empirical_constant > 0

    def test_power_lemma_r_zero(self):
        # ||X^2||_1 = ||X||_2^2 exactly when r = 0
        result = check_orlicz_power_lemma(stress_family(20), 0.0)
        assert result.max_square_ratio == pytest.approx(1.0)

    def test_scaling_lemma(self):
        params = OrliczParams(2.0, 1.0)
        assert check_orlicz_scaling_lemma(stress_family(20), params, 1.0) == pytest.approx(1.0)
        assert check_orlicz_scaling_lemma(stress_family(20), params, 0.25) > 1.0
        assert check_orlicz_scaling_lemma(stress_family(20), params, 4.0) < 1.0
