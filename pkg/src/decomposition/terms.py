"""
Dyadic martingale/coboundary terms d_{k,I} of a stationary field.

Every term is built symbolically on the AtomCombination of f, so its
measurability and its orthomartingale property can be checked exactly by
truncation.

Per-axis operators along axis q (block b = 2^k):
    U_k f = E_{-b}[S_b f]                      (coboundary block)
    D_0 f = f - E_{-1}[f]                      (martingale part at scale 1)
    D_k f = U_{k-1} f + U_{k-1} f o T^{b/2} - U_k f

The adapted term is prod_{q in I} D^{(q)}_{k_q} prod_{q not in I} U^{(q)}_{k_q} f.
"""

import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, Tuple

from config.experiment_kinds import DecompositionVariant
from src.core.error_handler import DecompositionError, DomainError, require_dimension
from src.core.logger import get_logger
from src.fields.innovations import (
    AtomCombination,
    axis_projection,
    box_shift_sum,
    combination_sum,
    conditional_projection,
    is_measurable,
    shift
)
from src.fields.models import FieldModel, symbolic_partial_sum
from src.lattice.geometry import LatticeIndex, as_index

logger = get_logger(__name__)

AxisSet = FrozenSet[int]

@dataclass(frozen=True)
class DecompositionTerm:
    """
    One term d_{k,I} with the index at which it is measurable.

    Axes are 0-based: I and Z are subsets of range(d).
    """
    k: LatticeIndex
    I: AxisSet
    combination: AtomCombination
    Z: AxisSet
    defining_index: LatticeIndex
    variant: DecompositionVariant = DecompositionVariant.ADAPTED

    @property
    def d(self) -> int:
        return len(self.k)

    @property
    def step(self) -> LatticeIndex:
        """Lattice step 2^k of the shifted family."""
        return tuple(2 ** a for a in self.k)

    def is_measurable(self) -> bool:
        return is_measurable(self.combination, self.defining_index)

    def is_orthomartingale(self, depth: int = 2) -> bool:
        """
        Along every q in I, the copies shifted by j 2^{k_q} e_q (1 <= j <= depth)
        have zero projection on the defining index.
        """
        for q in self.I:
            for j in range(1, depth + 1):
                moved = shift(self.combination, _axis_offset(self.d, q, j * self.step[q]))
                if conditional_projection(moved, self.defining_index).terms:
                    return False
        return True

def zero_axes(k: LatticeIndex) -> AxisSet:
    """Z(k): the axes where k_q = 0."""
    return frozenset(q for q, a in enumerate(k) if a == 0)

def _axis_offset(d: int, q: int, t: int) -> LatticeIndex:
    return tuple(t if p == q else 0 for p in range(d))

def axis_partial_sum(c: AtomCombination, q: int, m: int, d: int) -> AtomCombination:
    """Sum of shift(c, t e_q) over 0 <= t < m."""
    return box_shift_sum(c, tuple(m if p == q else 1 for p in range(d)))

def coboundary_block(c: AtomCombination, q: int, k: int, d: int) -> AtomCombination:
    """U_k along axis q."""
    b = 2 ** k
    return axis_projection(axis_partial_sum(c, q, b, d), q, -b)

def martingale_block(c: AtomCombination, q: int, k: int, d: int) -> AtomCombination:
    """D_k along axis q."""
    if k == 0:
        return c - axis_projection(c, q, -1)
    half = 2 ** (k - 1)
    previous = coboundary_block(c, q, k - 1, d)
    return previous + shift(previous, _axis_offset(d, q, half)) - coboundary_block(c, q, k, d)

def listing_block(c: AtomCombination, q: int, k: int, d: int) -> AtomCombination:
    """Martingale block of the one-dimensional proof listing along axis q."""
    if k == 0:
        return c - axis_projection(c, q, -1)
    summed = axis_partial_sum(c, q, 2 ** k, d)
    return axis_projection(summed, q, -(2 ** (k - 1))) - axis_projection(summed, q, -(2 ** k))

def _validate_term_index(model: FieldModel, k: Iterable[int], I: Iterable[int]) -> Tuple[LatticeIndex, AxisSet]:
    k = as_index(k)
    I = frozenset(int(q) for q in I)
    if len(k) != model.d or any(a < 0 for a in k):
        raise DomainError(f"Dyadic exponent must be >= 0 in dimension {model.d}, got {k}")
    if not I <= frozenset(range(model.d)):
        raise DomainError(f"Axis subset {sorted(I)} is not contained in [0, {model.d})")
    return k, I

def _adapted(model: FieldModel, k: LatticeIndex, I: AxisSet) -> Tuple[AtomCombination, LatticeIndex]:
    c = model.f
    for q, a in enumerate(k):
        c = martingale_block(c, q, a, model.d) if q in I else coboundary_block(c, q, a, model.d)
        if not c.terms:
            break
    index = tuple(0 if q in I else -(2 ** a) for q, a in enumerate(k))
    return c, index

def _block_listing(model: FieldModel, k: LatticeIndex, I: AxisSet) -> Tuple[AtomCombination, LatticeIndex]:
    c = model.f
    for q, a in enumerate(k):
        c = listing_block(c, q, a, model.d) if q in I else coboundary_block(c, q, a, model.d)
        if not c.terms:
            break
    index = tuple(
        (0 if a == 0 else -(2 ** (a - 1))) if q in I else -(2 ** a)
        for q, a in enumerate(k)
    )
    return c, index

def _subsets(axes: AxisSet) -> Iterator[AxisSet]:
    ordered = sorted(axes)
    for size in range(len(ordered) + 1):
        for chosen in itertools.combinations(ordered, size):
            yield frozenset(chosen)

def _closed_form(model: FieldModel, k: LatticeIndex, I: AxisSet) -> Tuple[AtomCombination, LatticeIndex]:
    """Signed subset sum over I'' in I \\ Z(k) and I' in I & Z(k)."""
    Z = zero_axes(k)
    block = tuple(2 ** (a + (q in Z) - (q in I)) for q, a in enumerate(k))
    partial = symbolic_partial_sum(model, block)
    parts = []
    for outer in _subsets(I - Z):
        for inner in _subsets(I & Z):
            exponents = [a - (q in outer) for q, a in enumerate(k)]
            if any(e < 0 for e in exponents):
                raise DecompositionError(f"Exponent underflow at k={k}, I''={sorted(outer)}")
            index = tuple(-(2 ** e) - (q in inner) for q, e in enumerate(exponents))
            sign = -1.0 if (len(outer) + len(inner)) % 2 else 1.0
            parts.append(sign * conditional_projection(partial, index))
    index = tuple(
        (-1 if q in Z else -(2 ** (a - 1))) if q in I else -(2 ** a)
        for q, a in enumerate(k)
    )
    return combination_sum(parts), index

BUILDERS = {
    DecompositionVariant.ADAPTED: _adapted,
    DecompositionVariant.CLOSED_FORM: _closed_form,
    DecompositionVariant.BLOCK_LISTING: _block_listing,
}

def d_kI(model: FieldModel,
         k: LatticeIndex,
         I: Iterable[int],
         variant: DecompositionVariant = DecompositionVariant.ADAPTED,
         validate: bool = True) -> DecompositionTerm:
    """
    Build the term d_{k,I} of a field model.

    Args:
        model: Field model
        k: Dyadic exponents, k >= 0
        I: Martingale axes (0-based)
        variant: Construction of the term
        validate: Check measurability and the orthomartingale property

    Returns:
        DecompositionTerm: The symbolic term and its defining index

    Raises:
        DomainError: If k or I is out of range
        DecompositionError: If a validated term breaks either invariant
    """
    k, I = _validate_term_index(model, k, I)
    variant = DecompositionVariant(variant)
    combination, index = BUILDERS[variant](model, k, I)
    term = DecompositionTerm(k, I, combination, zero_axes(k), index, variant)

    if validate:
        if not term.is_measurable():
            raise DecompositionError(f"d_(k={k}, I={sorted(I)}) is not measurable at {index}")
        if not term.is_orthomartingale():
            raise DecompositionError(f"d_(k={k}, I={sorted(I)}) is not an orthomartingale difference")
    return term

def all_terms(model: FieldModel,
              n: LatticeIndex,
              variant: DecompositionVariant = DecompositionVariant.ADAPTED) -> Tuple[DecompositionTerm, ...]:
    """Every d_{k,I} with 0 <= k <= n and I a subset of the axes."""
    n = as_index(n)
    axes = frozenset(range(model.d))
    return tuple(
        d_kI(model, k, I, variant)
        for k in itertools.product(*(range(a + 1) for a in n))
        for I in _subsets(axes)
    )

@require_dimension(1)
def u_k(model: FieldModel, k: int) -> AtomCombination:
    """u_k = E_{-2^k}[S_{2^k} f] in dimension 1."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return conditional_projection(symbolic_partial_sum(model, (2 ** k,)), (-(2 ** k),))

@require_dimension(1)
def d_k(model: FieldModel, k: int) -> AtomCombination:
    """d_k = u_k + u_k o T^{2^k} - u_{k+1}, a martingale difference at step 2^{k+1}."""
    u = u_k(model, k)
    return u + shift(u, (2 ** k,)) - u_k(model, k + 1)
