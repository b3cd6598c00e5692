import pytest

from config.experiment_kinds import LawKind
from src.fields.innovations import InnovationModel, MarginalLaw
from src.fields.models import make_causal_linear, make_orthomartingale_atom, make_product_orthomartingale

RADEMACHER = MarginalLaw(LawKind.RADEMACHER)

@pytest.fixture
def rademacher_1d():
    return InnovationModel.iid(RADEMACHER, 1)

@pytest.fixture
def rademacher_2d():
    return InnovationModel.iid(RADEMACHER, 2)

@pytest.fixture
def atom_model_1d(rademacher_1d):
    return make_orthomartingale_atom(rademacher_1d)

@pytest.fixture
def product_model_2d():
    return make_product_orthomartingale(2, [LawKind.RADEMACHER, LawKind.RADEMACHER])

@pytest.fixture
def linear_model_1d(rademacher_1d):
    return make_causal_linear(rademacher_1d, {(0,): 1.0, (1,): 2.0, (3,): -1.0})

@pytest.fixture
def linear_model_2d(rademacher_2d):
    return make_causal_linear(rademacher_2d, {(0, 0): 1.0, (1, 0): -2.0, (0, 1): 1.0, (1, 1): 3.0})
