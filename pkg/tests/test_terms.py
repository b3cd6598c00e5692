import itertools

import pytest
from hypothesis import given, settings, strategies as st

from config.experiment_kinds import DecompositionVariant, LawKind
from src.core.error_handler import DomainError
from src.decomposition.terms import (
    all_terms,
    axis_partial_sum,
    coboundary_block,
    d_k,
    d_kI,
    martingale_block,
    u_k,
    zero_axes
)
from src.fields.innovations import (
    AtomCombination,
    InnovationModel,
    MarginalLaw,
    combination_sum,
    conditional_projection,
    shift
)
from src.fields.models import make_causal_linear
from tests.strategies import causal_coefficients, combinations

@st.composite
def small_models(draw):
    d = draw(st.integers(1, 2))
    innovation = InnovationModel.iid(MarginalLaw(LawKind.RADEMACHER), d)
    model = make_causal_linear(innovation, draw(causal_coefficients(d, support=3)))
    k = tuple(draw(st.integers(0, 2)) for _ in range(d))
    I = draw(st.sets(st.integers(0, d - 1)))
    return model, k, I

class TestAtomModel:
    def test_only_martingale_term_at_scale_one(self, atom_model_1d):
        nonempty = [t for t in all_terms(atom_model_1d, (3,)) if not t.combination.is_empty()]
        assert len(nonempty) == 1
        assert nonempty[0].k == (0,)
        assert nonempty[0].I == frozenset({0})
        assert nonempty[0].combination == atom_model_1d.f

    def test_coboundaries_vanish(self, atom_model_1d):
        for k in range(4):
            assert u_k(atom_model_1d, k).is_empty()
            assert d_k(atom_model_1d, k).is_empty()

class TestTermInvariants:
    @settings(max_examples=60, deadline=None)
    @given(small_models(), st.sampled_from(list(DecompositionVariant)))
    def test_every_variant_is_measurable_and_orthomartingale(self, case, variant):
        model, k, I = case
        term = d_kI(model, k, I, variant, validate=False)
        assert term.is_measurable()
        assert term.is_orthomartingale(depth=3)

    @settings(max_examples=100, deadline=None)
    @given(combinations(2, max_terms=6, span=4), st.integers(0, 1))
    def test_martingale_plus_coboundary_at_scale_one(self, c, q):
        assert martingale_block(c, q, 0, 2) + coboundary_block(c, q, 0, 2) == c

    @settings(max_examples=100, deadline=None)
    @given(combinations(1, max_terms=6, span=4), st.integers(0, 3))
    def test_block_sum_telescopes(self, c, n):
        # S_{2^n} = sum_k sum_j D_k o T^{j 2^k} + U_n
        pieces = [
            shift(martingale_block(c, 0, k, 1), (j * 2 ** k,))
            for k in range(n + 1)
            for j in range(2 ** (n - k))
        ]
        pieces.append(coboundary_block(c, 0, n, 1))
        assert combination_sum(pieces) == axis_partial_sum(c, 0, 2 ** n, 1)

    def test_zero_axes(self):
        assert zero_axes((0, 2, 0)) == frozenset({0, 2})

class TestOneDimensionalTerms:
    @pytest.mark.parametrize('variant', [DecompositionVariant.ADAPTED, DecompositionVariant.CLOSED_FORM])
    @pytest.mark.parametrize('k', [1, 2, 3])
    def test_coboundary_terms_are_u_k(self, linear_model_1d, variant, k):
        term = d_kI(linear_model_1d, (k,), set(), variant)
        assert term.combination == u_k(linear_model_1d, k)
        assert term.defining_index == (-(2 ** k),)

    def test_u_k_is_projection_of_block_sum(self, linear_model_1d):
        # S_2 = xi_1 + 3 xi_0 + 2 xi_-1 - xi_-2 - xi_-3 projected on sites <= -2
        assert u_k(linear_model_1d, 1) == AtomCombination({(-2,): -1.0, (-3,): -1.0})

    def test_d_k_is_martingale_difference(self, linear_model_1d):
        for k in range(3):
            step = 2 ** (k + 1)
            assert conditional_projection(d_k(linear_model_1d, k), (-step,)).is_empty()

    @settings(max_examples=60, deadline=None)
    @given(causal_coefficients(1, support=4), st.integers(0, 3))
    def test_adapted_martingale_block_is_d_k(self, coefficients, k):
        model = make_causal_linear(InnovationModel.iid(MarginalLaw(LawKind.RADEMACHER), 1), coefficients)
        expected = d_k(model, k)
        assert martingale_block(model.f, 0, k + 1, 1) == expected
        assert d_kI(model, (k + 1,), {0}, DecompositionVariant.ADAPTED).combination == expected

    def test_negative_k(self, linear_model_1d):
        with pytest.raises(DomainError):
            u_k(linear_model_1d, -1)

    def test_requires_dimension_one(self, linear_model_2d):
        with pytest.raises(DomainError):
            u_k(linear_model_2d, 1)

class TestValidation:
    def test_bad_exponent(self, linear_model_2d):
        with pytest.raises(DomainError):
            d_kI(linear_model_2d, (1, -1), {0})
        with pytest.raises(DomainError):
            d_kI(linear_model_2d, (1,), {0})

    def test_bad_axis(self, linear_model_2d):
        with pytest.raises(DomainError):
            d_kI(linear_model_2d, (1, 1), {2})

    def test_all_terms_count(self, linear_model_2d):
        terms = all_terms(linear_model_2d, (1, 2))
        assert len(terms) == 2 * 3 * 4
        assert {t.I for t in terms} == {frozenset(s) for r in range(3) for s in itertools.combinations(range(2), r)}
