import math

import numpy as np
import pytest
from scipy.stats import norm

from config.experiment_kinds import DecompositionVariant, Verdict
from src.core.error_handler import ConfigError, ExperimentError
from src.harness.experiments import (
    check_deviation_inequality,
    check_orlicz_lemmas,
    check_weak_type_transfer,
    deviation_bound,
    deviation_joint_law,
    dyadic_ratio_experiment,
    estimate_maximal_norms,
    series_experiment,
    verify_decomposition,
    wilson_interval,
    window_schedule
)
from src.stats.laws import DiscreteLaw
from src.stats.lemmas import PairedLaw, doob_pair
from tests.strategies import random_linear_models

def verdict(report, statistic):
    return next(r for r in report.records if r.statistic == statistic)

class TestHelpers:
    def test_wilson_zero_successes(self):
        z = norm.ppf(0.995)
        lo, hi = wilson_interval(0, 1000, 0.99)
        assert lo == 0.0
        assert hi == pytest.approx(z * z / (1000 + z * z))

    def test_wilson_contains_estimate(self):
        lo, hi = wilson_interval(30, 100, 0.99)
        assert lo < 0.3 < hi

    def test_wilson_coverage(self):
        rng = np.random.default_rng(0xC0FFEE)
        truths = rng.uniform(0.01, 0.99, size=1000)
        counts = rng.binomial(500, truths)
        covered = 0
        for truth, count in zip(truths, counts):
            lo, hi = wilson_interval(int(count), 500, 0.999)
            covered += lo <= truth <= hi
        assert covered >= 990

    def test_wilson_needs_trials(self):
        with pytest.raises(ExperimentError):
            wilson_interval(0, 0)

    def test_deviation_bound(self):
        assert deviation_bound(0.0, 1.0) == 2.0
        assert deviation_bound(2.0, 8.0) == pytest.approx(2.0 * math.exp(-0.25))

    def test_window_schedule(self):
        assert window_schedule((5,), (8,)) == [(5,), (6,), (7,), (8,)]
        assert window_schedule((3, 4), (5, 5)) == [(3, 4), (4, 5), (5, 5)]
        assert window_schedule((6,), (6,)) == [(6,)]

class TestDeviation:
    def test_joint_law_rademacher(self):
        s, v, w = deviation_joint_law(DiscreteLaw.rademacher(), 4)
        assert w.sum() == pytest.approx(1.0)
        assert np.all(v == 8.0)
        assert float(w[np.abs(s) == 4].sum()) == pytest.approx(0.125)

    def test_exact_rademacher(self):
        report = check_deviation_inequality(4, 'rademacher', [2, 4], [4, 8], replications=10, seed=0)
        assert verdict(report, 'rademacher:P(x=2,y=8)').value == pytest.approx(0.125)
        assert verdict(report, 'rademacher:P(x=4,y=4)').value == 0.0
        assert report.passed

    def test_monte_carlo_gaussian(self):
        report = check_deviation_inequality(16, 'gaussian', [2, 4], [16, 32], replications=20000, seed=5)
        probability = verdict(report, 'gaussian:P(x=2,y=32)')
        assert probability.ci_lo <= probability.value <= probability.ci_hi
        assert report.passed

    def test_monte_carlo_is_thread_independent(self):
        single = check_deviation_inequality(8, 'gaussian', [1, 3], [8], replications=25000, seed=2, threads=1)
        pooled = check_deviation_inequality(8, 'gaussian', [1, 3], [8], replications=25000, seed=2, threads=3)
        assert single.records == pooled.records

class TestDecompositionExperiment:
    def test_adapted_is_binding(self):
        models = random_linear_models(1, 3, 4, seed=1)
        report = verify_decomposition(models, (4,), replications=20, seed=9, threads=2)
        assert verdict(report, 'adapted:pass_rate').verdict == Verdict.PASS.value
        for name in ('closed_form', 'block_listing', 'listed_dim1'):
            assert verdict(report, f'{name}:pass_rate').verdict == Verdict.RECORDED.value
        assert report.exit_code == 0

    def test_listed_form_only_in_one_dimension(self, product_model_2d):
        report = verify_decomposition([product_model_2d], (2, 2), replications=4, seed=1,
                                      variants=[DecompositionVariant.ADAPTED])
        assert not any(r.statistic.startswith('listed_dim1') for r in report.records)
        assert report.passed

class TestSeriesExperiment:
    def test_atom_model_deviates_from_zero(self, atom_model_1d):
        report = series_experiment(atom_model_1d, (16,), seed=0)
        assert verdict(report, 'hannan_series').value == pytest.approx(1.0)
        assert verdict(report, 'mw_series').value > 0
        assert report.passed

    def test_two_dimensional_model(self, linear_model_2d):
        report = series_experiment(linear_model_2d, (4, 4), seed=0)
        assert verdict(report, 'series_minus_coefficient_form').verdict == Verdict.RECORDED.value
        assert report.passed

class TestMaximalExperiment:
    def test_without_caps(self, atom_model_1d):
        report = estimate_maximal_norms(atom_model_1d, [(3,), (4,), (5,)], 1.5, 0.0, replications=50,
                                        seed=4, orlicz=True)
        assert len([r for r in report.records if r.statistic == '||M_W||_1.5']) == 3
        assert len([r for r in report.records if r.statistic == 'growth']) == 2
        assert verdict(report, 'final_growth').verdict == Verdict.RECORDED.value
        assert verdict(report, 'mean_Z_0').value > 0
        assert report.passed

    def test_cap_is_binding(self, atom_model_1d):
        tight = {'source': 'pilot', 'growth_ratio_cap': {'d1': 0.01}}
        report = estimate_maximal_norms(atom_model_1d, [(3,), (4,)], 1.5, 0.0, replications=30, seed=4,
                                        calibration=tight)
        assert verdict(report, 'final_growth').verdict == Verdict.FAIL.value
        assert report.exit_code == 1

    def test_unpiloted_cap_is_recorded(self, atom_model_1d):
        analytic = {'source': 'analytic-cap', 'growth_ratio_cap': {'d1': 0.01}}
        report = estimate_maximal_norms(atom_model_1d, [(3,), (4,)], 1.5, 0.0, replications=30, seed=4,
                                        calibration=analytic)
        assert verdict(report, 'final_growth').verdict == Verdict.RECORDED.value
        assert report.exit_code == 0

class TestDyadicExperiment:
    def test_ratios_at_least_one(self, atom_model_1d):
        report = dyadic_ratio_experiment(atom_model_1d, [(3,), (4,)], replications=25, seed=3,
                                         calibration={'source': 'pilot', 'dyadic_ratio_cap': {'d1': 1e6}})
        assert verdict(report, 'dyadic_within_full').verdict == Verdict.PASS.value
        ratios = [r.value for r in report.records if r.statistic == 'ratio']
        assert len(ratios) == 50
        assert min(ratios) >= 1.0
        assert verdict(report, 'max_ratio').verdict == Verdict.PASS.value

class TestLemmaExperiment:
    def test_defaults_pass(self):
        report = check_orlicz_lemmas(family_size=12, series_laws=6, weak_pairs=4)
        assert report.passed
        assert verdict(report, 'weak_lp_chain(p=1.5)').verdict == Verdict.PASS.value
        assert verdict(report, 'weak_type_to_orlicz(2,2)').verdict == Verdict.RECORDED.value

class TestWeakTypeTransfer:
    def test_constant_zero_and_walk_pairs(self):
        pairs = [PairedLaw((4.0,), (4.0,), (1.0,)), PairedLaw((0.0,), (0.0,), (1.0,)), doob_pair(6)]
        report = check_weak_type_transfer(pairs, [0.5, 1.0, 1.5, 2.0])
        assert report.passed
        # X = Y = 4: the gap peaks at t = 1.5 with 1 - 2.5 / 1.5
        assert verdict(report, 'weak_type[0]:max(lhs-rhs)').value == pytest.approx(1 - 2.5 / 1.5)
        assert verdict(report, 'weak_type[1]:max(lhs-rhs)').value == 0.0
        assert verdict(report, 'weak_type[0]:rhs(t=1)').value == pytest.approx(3.0)

    def test_pair_outside_hypothesis(self):
        with pytest.raises(ConfigError):
            check_weak_type_transfer([PairedLaw((1.0,), (0.0,), (1.0,))], [1.0])
