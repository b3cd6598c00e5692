import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from src.core.error_handler import DomainError, ModelError, NormError
from src.stats.laws import DiscreteLaw, stress_family
from src.stats.norms import (
    OrliczParams,
    empirical_lp_norm,
    empirical_orlicz_norm,
    lp_norm,
    orlicz_modular,
    orlicz_norm,
    phi,
    weak_lp_norms
)
from tests.strategies import discrete_laws

class TestDiscreteLaw:
    def test_from_atoms_merges(self):
        law = DiscreteLaw.from_atoms([(1.0, 0.25), (-1.0, 0.5), (1.0, 0.25)])
        assert law.values == (-1.0, 1.0)
        assert law.probabilities == (0.5, 0.5)

    def test_invalid_probabilities(self):
        with pytest.raises(ModelError):
            DiscreteLaw((0.0, 1.0), (0.5, 0.6))

    def test_empty_law(self):
        with pytest.raises(NormError):
            DiscreteLaw((), ())

    def test_gaussian_surrogate_moments(self):
        law = DiscreteLaw.gaussian()
        assert law.expect(np.square) == pytest.approx(1.0, rel=1e-12)
        assert law.expect(lambda x: x ** 4) == pytest.approx(3.0, rel=1e-10)

    def test_refined_keeps_mass(self):
        law = DiscreteLaw.two_point(0.2).refined(1e-3)
        assert law.size == 4
        assert sum(law.probabilities) == pytest.approx(1.0)
        assert law.mean == pytest.approx(0.0, abs=1e-12)

    def test_stress_family_is_deterministic(self):
        assert stress_family(20) == stress_family(20)
        assert len(stress_family(20)) == 20

class TestOrliczNorm:
    def test_phi(self):
        params = OrliczParams(2.0, 1.0)
        assert phi(0.0, params) == 0.0
        assert phi(1.0, params) == pytest.approx(1.0 + math.log(2.0))
        with pytest.raises(DomainError):
            phi(-1.0, params)

    @pytest.mark.parametrize('p,r', [(0.5, 0.0), (2.0, -1.0)])
    def test_parameter_domain(self, p, r):
        with pytest.raises(DomainError):
            OrliczParams(p, r)

    def test_for_dimension(self):
        assert OrliczParams.for_dimension(3) == OrliczParams(2.0, 4.0)

    def test_rademacher_l2(self):
        assert orlicz_norm(DiscreteLaw.rademacher(), OrliczParams(2.0)) == pytest.approx(1.0)

    def test_zero_law(self):
        assert orlicz_norm(DiscreteLaw.constant(0.0), OrliczParams(2.0, 2.0)) == 0.0

    def test_unit_atom_solves_modular(self):
        params = OrliczParams(2.0, 2.0)
        norm = orlicz_norm(DiscreteLaw.rademacher(), params)
        assert phi(1.0 / norm, params) == pytest.approx(1.0, rel=1e-10)
        assert norm > 1.0

    @settings(max_examples=60, deadline=None)
    @given(discrete_laws(), st.sampled_from([0.0, 1.0, 2.0]))
    def test_r_zero_is_lp_norm_and_monotone_in_r(self, law, r):
        base = orlicz_norm(law, OrliczParams(2.0, 0.0))
        assert base == pytest.approx(lp_norm(law, 2.0), rel=1e-12)
        assert orlicz_norm(law, OrliczParams(2.0, r)) >= base * (1 - 1e-9)

    @settings(max_examples=60, deadline=None)
    @given(discrete_laws(), st.floats(0.1, 10.0))
    def test_homogeneity(self, law, a):
        params = OrliczParams(2.0, 2.0)
        assert orlicz_norm(law.scaled(a), params) == pytest.approx(a * orlicz_norm(law, params), rel=1e-8)

    def test_non_finite_samples(self):
        with pytest.raises(NormError):
            orlicz_norm(np.array([1.0, np.nan]), OrliczParams(2.0, 1.0))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(-20, 20), st.floats(-20, 20)), min_size=1, max_size=12),
           st.sampled_from([(2.0, 0.0), (2.0, 2.0), (1.5, 1.0), (1.0, 3.0)]))
    def test_triangle_inequality(self, pairs, pr):
        params = OrliczParams(*pr)
        x, y = (np.array(column) for column in zip(*pairs))
        total = orlicz_norm(x + y, params)
        assert total <= (orlicz_norm(x, params) + orlicz_norm(y, params)) * (1 + 1e-9) + 1e-12

    @settings(max_examples=100, deadline=None)
    @given(discrete_laws(), st.sampled_from([0.5, 1.0, 2.0, 4.0]), st.sampled_from([1.0, 1.5, 2.0]))
    def test_root_solves_modular(self, law, r, p):
        params = OrliczParams(p, r)
        norm = orlicz_norm(law, params)
        assume(norm > 0)
        g = orlicz_modular(np.abs(law.support), law.weights, params)
        assert abs(g(norm) - 1.0) <= 1e-8

class TestWeakLp:
    @pytest.mark.parametrize('p', [1.25, 1.5, 2.0])
    def test_chain_on_stress_family(self, p):
        for law in stress_family(20):
            dual, tail = weak_lp_norms(law, p)
            assert tail <= dual * (1 + 1e-9) + 1e-12
            assert dual <= lp_norm(law, p) * (1 + 1e-9) + 1e-12

    @settings(max_examples=100, deadline=None)
    @given(discrete_laws(), st.sampled_from([1.25, 1.5, 2.0]))
    def test_chain_property(self, law, p):
        dual, tail = weak_lp_norms(law, p)
        assert tail <= dual * (1 + 1e-9) + 1e-12
        assert dual <= lp_norm(law, p) * (1 + 1e-9) + 1e-12

    def test_constant(self):
        dual, tail = weak_lp_norms(DiscreteLaw.constant(3.0), 1.5)
        assert dual == pytest.approx(3.0)
        assert tail == pytest.approx(3.0)

    def test_p_outside_range(self):
        with pytest.raises(DomainError):
            weak_lp_norms(DiscreteLaw.rademacher(), 2.5)

class TestEmpiricalNorms:
    def test_gaussian_l2(self):
        samples = np.random.default_rng(0).standard_normal(100000)
        estimate = empirical_lp_norm(samples, 2.0, seed=1, resamples=50)
        assert estimate.value == pytest.approx(1.0, abs=3 * math.sqrt(2.0 / 100000) + 1e-3)
        assert estimate.ci_lo <= estimate.value <= estimate.ci_hi

    def test_normal_interval(self):
        samples = np.random.default_rng(0).standard_normal(5000)
        estimate = empirical_lp_norm(samples, 1.5, method='normal')
        assert estimate.method == 'normal'
        assert estimate.ci_lo <= estimate.value <= estimate.ci_hi

    def test_empirical_orlicz_matches_exact_on_law_samples(self):
        samples = np.array([-1.0, 1.0] * 50)
        estimate = empirical_orlicz_norm(samples, OrliczParams(2.0, 2.0), resamples=20)
        assert estimate.value == pytest.approx(orlicz_norm(DiscreteLaw.rademacher(), OrliczParams(2.0, 2.0)))
