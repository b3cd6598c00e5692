from .innovations import (
    MarginalLaw,
    InnovationModel,
    AtomCombination,
    combination_sum,
    shift,
    conditional_projection,
    axis_projection,
    hannan_projector,
    is_measurable,
    box_shift_sum
)
from .sampling import (
    Realization,
    sample_atoms,
    sample_box,
    evaluate,
    evaluate_grid
)
from .models import (
    FieldModel,
    FieldSample,
    make_orthomartingale_atom,
    make_product_orthomartingale,
    make_causal_linear,
    render_on,
    render_sample,
    symbolic_partial_sum
)

__all__ = [
    'MarginalLaw',
    'InnovationModel',
    'AtomCombination',
    'combination_sum',
    'shift',
    'conditional_projection',
    'axis_projection',
    'hannan_projector',
    'is_measurable',
    'box_shift_sum',
    'Realization',
    'sample_atoms',
    'sample_box',
    'evaluate',
    'evaluate_grid',
    'FieldModel',
    'FieldSample',
    'make_orthomartingale_atom',
    'make_product_orthomartingale',
    'make_causal_linear',
    'render_on',
    'render_sample',
    'symbolic_partial_sum'
]
