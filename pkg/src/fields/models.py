from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config.experiment_kinds import LawKind, ModelKind
from src.core.error_handler import DomainError, ModelError
from src.core.logger import get_logger
from src.fields.innovations import (
    AtomCombination,
    InnovationModel,
    MarginalLaw,
    box_shift_sum,
    shift
)
from src.fields.sampling import Realization, evaluate, evaluate_grid, sample_atoms
from src.lattice.geometry import LatticeIndex, Window, as_index, zeros

logger = get_logger(__name__)

@dataclass(frozen=True)
class FieldModel:
    """
    Generative specification of a stationary field X_i = f o T^i.

    orthomartingale_atom: f is the origin atom.
    causal_linear: f = sum_{j >= 0} a_j xi_{-j} over finitely many j.
    """
    d: int
    innovation: InnovationModel
    kind: ModelKind
    coefficients: Tuple[Tuple[LatticeIndex, float], ...] = ()

    @cached_property
    def f(self) -> AtomCombination:
        if self.kind == ModelKind.ORTHOMARTINGALE_ATOM:
            return AtomCombination.atom(zeros(self.d))
        return AtomCombination({tuple(-a for a in j): value for j, value in self.coefficients})

    @property
    def coefficient_map(self) -> Mapping[LatticeIndex, float]:
        if self.kind == ModelKind.ORTHOMARTINGALE_ATOM:
            return {zeros(self.d): 1.0}
        return dict(self.coefficients)

    @property
    def extent(self) -> LatticeIndex:
        """Largest coefficient offset per axis: f only involves atoms at sites >= -extent."""
        keys = list(self.coefficient_map)
        if not keys:
            return zeros(self.d)
        return tuple(int(v) for v in np.max(np.array(keys), axis=0))

    @property
    def coefficient_energy(self) -> float:
        """sum_j a_j^2, reported for reference; coefficients are never rescaled."""
        return float(sum(v * v for v in self.coefficient_map.values()))

def _marginal(law: Union[MarginalLaw, LawKind, str]) -> MarginalLaw:
    return law if isinstance(law, MarginalLaw) else MarginalLaw(LawKind(law))

def make_orthomartingale_atom(innovation: InnovationModel) -> FieldModel:
    return FieldModel(innovation.d, innovation, ModelKind.ORTHOMARTINGALE_ATOM)

def make_product_orthomartingale(d: int, axis_laws: Sequence[Union[MarginalLaw, LawKind, str]]) -> FieldModel:
    """
    Product orthomartingale X_i = prod_q e_q(i_q).

    Args:
        d: Dimension
        axis_laws: One centered law per axis

    Raises:
        ModelError: If the number of laws differs from d or a law is not centered
    """
    if len(axis_laws) != d:
        raise ModelError(f"Product model of dimension {d} needs {d} axis laws, got {len(axis_laws)}")
    innovation = InnovationModel.product([_marginal(law) for law in axis_laws])
    return make_orthomartingale_atom(innovation)

def make_causal_linear(innovation: InnovationModel, coefficients: Mapping[Sequence[int], float]) -> FieldModel:
    """
    Causal linear field f = sum_j a_j xi_{-j}.

    Args:
        innovation: Innovation model
        coefficients: Finite table j -> a_j with every j >= 0

    Raises:
        ModelError: If a key has a negative coordinate or the wrong dimension
    """
    table = {}
    for key, value in coefficients.items():
        j = as_index((key,) if np.isscalar(key) else key)
        if len(j) != innovation.d:
            raise ModelError(f"Coefficient key {j} does not match dimension {innovation.d}")
        if any(a < 0 for a in j):
            raise ModelError(f"Causal coefficient key {j} has a negative coordinate")
        if value != 0:
            table[j] = table.get(j, 0.0) + float(value)
    return FieldModel(innovation.d, innovation, ModelKind.CAUSAL_LINEAR, tuple(sorted(table.items())))

@dataclass(frozen=True, eq=False)
class FieldSample:
    """Field values on a window; values[n - 1] = f o T^{site(n)} on the realization."""
    window: Window
    values: np.ndarray
    model: FieldModel
    seed: int
    realization: Realization

    def spot_check(self, count: int = 8, atol: float = 1e-12) -> bool:
        """Re-evaluate a few sites symbolically and compare with the dense values."""
        rng = np.random.default_rng(self.seed & 0xFFFFFFFF)
        for _ in range(count):
            position = tuple(int(rng.integers(1, s + 1)) for s in self.window.sizes)
            expected = evaluate(shift(self.model.f, self.window.site(position)), self.realization)
            if abs(expected - self.values[tuple(p - 1 for p in position)]) > atol * (1 + abs(expected)):
                return False
        return True

def render_on(model: FieldModel, realization: Realization, window: Window) -> FieldSample:
    """Render the field on a window from an existing realization."""
    values = evaluate_grid(model.f, realization, window.origin, window.sizes)
    values.setflags(write=False)
    return FieldSample(window, values, model, realization.seed, realization)

def render_sample(model: FieldModel, window: Window, seed: int,
                  margin: Optional[Sequence[Tuple[int, int]]] = None) -> FieldSample:
    """
    Render dense field values on a window.

    The margin below each axis is the coefficient extent; callers needing
    more room (decomposition) pass a wider margin.
    """
    required = [(e, 0) for e in model.extent]
    if margin is not None:
        required = [(max(a, c), max(b, e)) for (a, b), (c, e) in zip(required, margin)]
    realization = sample_atoms(model.innovation, window, seed, required)
    return render_on(model, realization, window)

def symbolic_partial_sum(model: FieldModel, n: LatticeIndex) -> AtomCombination:
    """
    S_n(f) = sum_{0 <= i <= n - 1} shift(f, i), merged symbolically.

    Raises:
        DomainError: If n is not >= 1
        SupportOverflowError: If the result exceeds the support cap
    """
    n = as_index(n)
    if len(n) != model.d or any(a < 1 for a in n):
        raise DomainError(f"Partial sum index must be >= 1 in dimension {model.d}, got {n}")
    return _cached_partial_sum(model, n)

# Shared by replication threads; AtomCombination is immutable once built.
@lru_cache(maxsize=1024)
def _cached_partial_sum(model: FieldModel, n: LatticeIndex) -> AtomCombination:
    return box_shift_sum(model.f, n)
