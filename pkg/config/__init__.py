from .experiment_kinds import (
    ExperimentKind,
    LawKind,
    InnovationKind,
    ModelKind,
    DecompositionVariant,
    ZBlockVariant,
    Verdict
)

__all__ = [
    'ExperimentKind',
    'LawKind',
    'InnovationKind',
    'ModelKind',
    'DecompositionVariant',
    'ZBlockVariant',
    'Verdict'
]
