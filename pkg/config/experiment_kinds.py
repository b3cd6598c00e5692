from enum import Enum


class ExperimentKind(str, Enum):
    """Experiment kinds accepted by the runner, keyed by their config spelling."""
    MAXIMAL_ESTIMATE = 'maximal-estimate'
    VERIFY_DECOMPOSITION = 'verify-decomposition'
    CHECK_DEVIATION = 'check-deviation'
    CHECK_ORLICZ_LEMMAS = 'check-orlicz-lemmas'
    SERIES = 'series'
    DYADIC_RATIO = 'dyadic-ratio'

    @classmethod
    def from_string(cls, value: str) -> 'ExperimentKind':
        for kind in cls:
            if kind.value == value:
                return kind
        raise ValueError(f"Unknown experiment kind: {value}")


class LawKind(str, Enum):
    """Marginal innovation laws. All are centered with unit variance."""
    RADEMACHER = 'rademacher'
    GAUSSIAN = 'gaussian'
    TWO_POINT = 'two_point'
    HEAVY_TAIL = 'heavy_tail'
    DISCRETE = 'discrete'


class InnovationKind(str, Enum):
    IID = 'iid'
    PRODUCT = 'product'


class ModelKind(str, Enum):
    ORTHOMARTINGALE_ATOM = 'orthomartingale_atom'
    CAUSAL_LINEAR = 'causal_linear'


class DecompositionVariant(str, Enum):
    """Ways of building the dyadic terms d_{k,I}.

    ADAPTED is the exact tensorised martingale/coboundary split and the only
    variant whose verdicts are binding. CLOSED_FORM follows the general
    subset-sum display; BLOCK_LISTING tensorises the one-dimensional listing.
    """
    ADAPTED = 'adapted'
    CLOSED_FORM = 'closed_form'
    BLOCK_LISTING = 'block_listing'


class ZBlockVariant(str, Enum):
    LITERAL = 'literal'
    MATCHED = 'matched'


class Verdict(str, Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    RECORDED = 'RECORDED'
