import itertools

import pytest
from hypothesis import given, settings, strategies as st

from config.experiment_kinds import LawKind
from src.core.error_handler import ModelError
from src.fields.innovations import (
    AtomCombination,
    MarginalLaw,
    box_shift_sum,
    combination_sum,
    conditional_projection,
    hannan_projector,
    is_measurable,
    shift
)
from src.lattice.geometry import lattice_add, lattice_min, zeros
from tests.strategies import combinations, lattice_indices

@st.composite
def combination_and_indices(draw):
    d = draw(st.integers(1, 3))
    return draw(combinations(d)), draw(lattice_indices(d)), draw(lattice_indices(d))

class TestAtomCombination:
    def test_zero_coefficients_dropped(self):
        c = AtomCombination({(0,): 0.0, (1,): 2.0})
        assert c.support() == ((1,),)
        assert len(c) == 1

    def test_arithmetic(self):
        a = AtomCombination({(0, 0): 1.0, (1, 0): 2.0}, 1.0)
        b = AtomCombination({(1, 0): -2.0})
        assert a + b == AtomCombination({(0, 0): 1.0}, 1.0)
        assert 2 * a - a == a
        assert combination_sum([a, b, -a]) == b

    def test_dense_round_trip(self):
        c = AtomCombination({(-1, 2): 3.0, (1, 0): -1.0})
        lo, dense = c.to_dense()
        assert lo == (-1, 0)
        assert AtomCombination.from_dense(lo, dense) == c

class TestConditioning:
    @settings(max_examples=300, deadline=None)
    @given(combination_and_indices())
    def test_idempotent(self, case):
        c, i, _ = case
        once = conditional_projection(c, i)
        assert conditional_projection(once, i) == once

    @settings(max_examples=300, deadline=None)
    @given(combination_and_indices())
    def test_shift_equivariance(self, case):
        c, i, j = case
        assert conditional_projection(shift(c, j), lattice_add(i, j)) == shift(conditional_projection(c, i), j)

    @settings(max_examples=300, deadline=None)
    @given(combination_and_indices())
    def test_composition_is_coordinatewise_min(self, case):
        c, i, j = case
        assert conditional_projection(conditional_projection(c, i), j) == conditional_projection(c, lattice_min(i, j))

    @settings(max_examples=100, deadline=None)
    @given(combination_and_indices())
    def test_projection_is_measurable(self, case):
        c, i, _ = case
        assert is_measurable(conditional_projection(c, i), i)

    def test_untruncated_axis(self):
        c = AtomCombination({(3, -1): 1.0, (3, 2): 1.0})
        assert conditional_projection(c, (None, 0)) == AtomCombination({(3, -1): 1.0})

    @pytest.mark.parametrize('d', [1, 2, 3])
    def test_orthomartingale_atoms(self, d):
        f = AtomCombination.atom(zeros(d))
        for i in itertools.product(range(9), repeat=d):
            if any(i) and sum(i) <= 8:
                assert not conditional_projection(shift(f, i), zeros(d)).terms

class TestHannanProjector:
    @settings(max_examples=100, deadline=None)
    @given(combinations(2))
    def test_projectors_pick_single_sites(self, c):
        for key, value in c.terms.items():
            assert hannan_projector(c, key) == AtomCombination({key: value})

    @settings(max_examples=100, deadline=None)
    @given(combinations(2))
    def test_reconstruction_of_centered_part(self, c):
        if not c.terms:
            return
        lo, hi = c.bounding_box()
        parts = [hannan_projector(c, j) for j in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))]
        assert combination_sum(parts) == AtomCombination(c.terms)

class TestBoxShiftSum:
    @settings(max_examples=100, deadline=None)
    @given(combinations(2, max_terms=5, span=3), st.integers(1, 4), st.integers(1, 4))
    def test_matches_naive_sum(self, c, m1, m2):
        naive = combination_sum(shift(c, (a, b)) for a in range(m1) for b in range(m2))
        assert box_shift_sum(c, (m1, m2)) == naive

class TestMarginalLaw:
    def test_discrete_law_standardized(self):
        law = MarginalLaw(LawKind.DISCRETE, atoms=((-2.0, 0.5), (2.0, 0.5)))
        assert law.law().values == (-1.0, 1.0)

    def test_uncentered_discrete_law(self):
        with pytest.raises(ModelError):
            MarginalLaw(LawKind.DISCRETE, atoms=((0.0, 0.5), (1.0, 0.5)))

    @pytest.mark.parametrize('kind', [k for k in LawKind if k != LawKind.DISCRETE])
    def test_unit_variance(self, kind):
        law = MarginalLaw(kind).law()
        assert law.mean == pytest.approx(0.0, abs=1e-12)
        assert law.variance == pytest.approx(1.0, rel=1e-12)
