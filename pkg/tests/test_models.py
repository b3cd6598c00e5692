import numpy as np
import pytest

from config.experiment_kinds import LawKind
from src.core.error_handler import DomainError, ModelError
from src.fields.innovations import AtomCombination, InnovationModel, MarginalLaw
from src.fields.models import (
    make_causal_linear,
    make_product_orthomartingale,
    render_sample,
    symbolic_partial_sum
)
from src.fields.sampling import evaluate
from src.lattice.geometry import Window
from src.lattice.prefix_table import build_prefix_table, rect_sum

class TestConstruction:
    def test_causal_linear_keys(self, rademacher_2d):
        model = make_causal_linear(rademacher_2d, {(0, 0): 1.0, (2, 1): -0.5})
        assert model.f == AtomCombination({(0, 0): 1.0, (-2, -1): -0.5})
        assert model.extent == (2, 1)
        assert model.coefficient_energy == pytest.approx(1.25)

    def test_negative_key_rejected(self, rademacher_1d):
        with pytest.raises(ModelError):
            make_causal_linear(rademacher_1d, {(-1,): 1.0})

    def test_wrong_dimension_rejected(self, rademacher_1d):
        with pytest.raises(ModelError):
            make_causal_linear(rademacher_1d, {(0, 0): 1.0})

    def test_product_needs_one_law_per_axis(self):
        with pytest.raises(ModelError):
            make_product_orthomartingale(3, [LawKind.RADEMACHER])

    def test_atom_model_f_is_origin_atom(self, atom_model_1d):
        assert atom_model_1d.f == AtomCombination.atom((0,))
        assert atom_model_1d.extent == (0,)

class TestPartialSums:
    def test_symbolic_partial_sum(self, linear_model_1d):
        # f = xi_0 + 2 xi_-1 - xi_-3
        s2 = symbolic_partial_sum(linear_model_1d, (2,))
        assert s2 == AtomCombination({(1,): 1.0, (0,): 3.0, (-1,): 2.0, (-2,): -1.0, (-3,): -1.0})

    def test_partial_sum_index_must_be_positive(self, linear_model_1d):
        with pytest.raises(DomainError):
            symbolic_partial_sum(linear_model_1d, (0,))

    @pytest.mark.parametrize('fixture', ['linear_model_1d', 'linear_model_2d', 'product_model_2d'])
    def test_symbolic_matches_numeric(self, fixture, request):
        model = request.getfixturevalue(fixture)
        sample = render_sample(model, Window((8,) * model.d), seed=21)
        table = build_prefix_table(sample.values)
        for n in [(1,) * model.d, (3,) * model.d, (8,) * model.d]:
            symbolic = evaluate(symbolic_partial_sum(model, n), sample.realization)
            assert rect_sum(table, (1,) * model.d, n) == pytest.approx(symbolic, rel=1e-9, abs=1e-9)

    def test_spot_check(self, linear_model_2d):
        assert render_sample(linear_model_2d, Window((16, 16)), seed=5).spot_check()

    @pytest.mark.slow
    def test_product_factorization(self, product_model_2d):
        for seed in range(100):
            sample = render_sample(product_model_2d, Window((64, 64)), seed=seed)
            e1, e2 = sample.realization.axis_values
            expected = np.multiply.outer(np.cumsum(e1), np.cumsum(e2))
            actual = build_prefix_table(sample.values).partial_sums()
            np.testing.assert_allclose(actual, expected, rtol=1e-10, atol=1e-10)

    def test_stationary_moments(self):
        innovation = InnovationModel.iid(MarginalLaw(LawKind.RADEMACHER), 1)
        model = make_causal_linear(innovation, {(0,): 1.0, (1,): 0.5})
        first = render_sample(model, Window((40000,)), seed=3).values
        second = render_sample(model, Window((40000,), origin=(10 ** 6,)), seed=3).values
        # long-run variance (1 + 0.5)^2
        tolerance = 3 * np.sqrt(2.25 / 40000)
        assert abs(first.mean() - second.mean()) < 2 * tolerance
        assert abs(np.mean(first ** 2) - np.mean(second ** 2)) < 0.05
