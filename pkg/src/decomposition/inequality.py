"""
Pointwise check of the dyadic decomposition bound

    max_{1 <= i <= 2^n} |S_i(f)| <= sum_{0 <= k <= n} sum_{I} max |S_i^I(T^{2^k}, d_{k,I})|

on one realization. For q in I the partial-sum extent runs over
1..2^{n_q - k_q}; for q not in I the block offset runs over 0..2^{n_q - k_q}.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from config.experiment_kinds import DecompositionVariant
from src.core.error_handler import DomainError
from src.core.logger import get_logger
from src.core.settings import SETTINGS
from src.decomposition.terms import DecompositionTerm, all_terms, d_k, u_k
from src.fields.innovations import AtomCombination, conditional_projection
from src.fields.models import FieldModel
from src.fields.sampling import Realization, evaluate_grid
from src.lattice.geometry import LatticeIndex, as_index, zeros
from src.lattice.prefix_table import build_prefix_table, directional_sum_grid

logger = get_logger(__name__)

INEQUALITY_RTOL = SETTINGS['numerics']['inequality_rtol']

@dataclass(frozen=True)
class PlannedTerm:
    """A term with the grid of block positions it is evaluated on."""
    term: DecompositionTerm
    shape: LatticeIndex

    @property
    def step(self) -> LatticeIndex:
        return self.term.step

    def trimmed(self) -> Tuple[slice, ...]:
        """Extents 1..2^{n-k} on I axes, offsets 0..2^{n-k} elsewhere."""
        return tuple(
            slice(0, s - 1) if q in self.term.I else slice(0, s)
            for q, s in enumerate(self.shape)
        )

@dataclass(frozen=True)
class InequalityPlan:
    """Terms of one (model, n, variant) and the atom box they read."""
    model: FieldModel
    n: LatticeIndex
    variant: DecompositionVariant
    terms: Tuple[PlannedTerm, ...]
    lo: LatticeIndex
    hi: LatticeIndex

@dataclass(frozen=True)
class PointwiseCheck:
    lhs: float
    rhs: float
    passed: bool
    contributions: Dict[str, float]

def _reach(c: AtomCombination, base: LatticeIndex, step: LatticeIndex, shape: LatticeIndex,
           lo: list, hi: list):
    box = c.bounding_box()
    if box is None:
        return
    low, high = box
    for q in range(len(lo)):
        lo[q] = min(lo[q], low[q] + base[q])
        hi[q] = max(hi[q], high[q] + base[q] + step[q] * (shape[q] - 1))

# Plans are frozen and only read, so replication threads share the cache.
@lru_cache(maxsize=64)
def inequality_plan(model: FieldModel,
                    n: LatticeIndex,
                    variant: DecompositionVariant = DecompositionVariant.ADAPTED) -> InequalityPlan:
    """
    Build every d_{k,I} for 0 <= k <= n once and record the atom box needed
    to evaluate them together with the left-hand side.

    Raises:
        DomainError: If n has the wrong dimension or a negative entry
    """
    n = as_index(n)
    if len(n) != model.d or any(a < 0 for a in n):
        raise DomainError(f"Dyadic exponent must be >= 0 in dimension {model.d}, got {n}")
    variant = DecompositionVariant(variant)
    origin = zeros(model.d)
    lo, hi = [0] * model.d, [0] * model.d
    _reach(model.f, origin, (1,) * model.d, tuple(2 ** a for a in n), lo, hi)

    planned = []
    for term in all_terms(model, n, variant):
        shape = tuple(2 ** (a - b) + 1 for a, b in zip(n, term.k))
        _reach(term.combination, origin, term.step, shape, lo, hi)
        planned.append(PlannedTerm(term, shape))
    logger.debug(f"Planned {len(planned)} {variant.value} terms for n={n}, atoms {lo}..{hi}")
    return InequalityPlan(model, n, variant, tuple(planned), tuple(lo), tuple(hi))

def required_margin(model: FieldModel, n: LatticeIndex,
                    variant: DecompositionVariant = DecompositionVariant.ADAPTED) -> Tuple[LatticeIndex, LatticeIndex]:
    """Lowest and highest atom sites read by verify_pointwise_inequality."""
    plan = inequality_plan(model, as_index(n), DecompositionVariant(variant))
    return plan.lo, plan.hi

def max_partial_sum(model: FieldModel, n: LatticeIndex, realization: Realization) -> float:
    """max_{1 <= i <= 2^n} |S_i(f)| on the realization."""
    values = evaluate_grid(model.f, realization, zeros(model.d), tuple(2 ** a for a in n))
    return float(np.max(np.abs(build_prefix_table(values).partial_sums())))

def term_maximum(planned: PlannedTerm, realization: Realization) -> float:
    """max over the admissible indices of |S_i^I(T^{2^k}, d_{k,I})|."""
    combination = planned.term.combination
    if combination.is_empty():
        return 0.0
    grid = evaluate_grid(combination, realization, zeros(planned.term.d), planned.shape, planned.step)
    sums = directional_sum_grid(build_prefix_table(grid), planned.term.I)
    return float(np.max(np.abs(sums[planned.trimmed()])))

def term_label(term: DecompositionTerm) -> str:
    return f"k={term.k} I={tuple(sorted(term.I))}"

def _passes(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + INEQUALITY_RTOL * (1 + abs(rhs))

def verify_pointwise_inequality(model: FieldModel,
                                n: LatticeIndex,
                                realization: Realization,
                                variant: DecompositionVariant = DecompositionVariant.ADAPTED) -> PointwiseCheck:
    """
    Evaluate both sides of the decomposition bound on a realization.

    Args:
        model: Field model
        n: Dyadic exponents of the window 2^n
        realization: Atoms covering required_margin(model, n, variant)
        variant: Construction of the terms

    Returns:
        PointwiseCheck: lhs, rhs, the verdict and the per-(k, I) maxima

    Raises:
        MarginError: If the realization does not cover the atoms read
    """
    plan = inequality_plan(model, as_index(n), DecompositionVariant(variant))
    lhs = max_partial_sum(model, plan.n, realization)
    contributions = {
        term_label(planned.term): term_maximum(planned, realization)
        for planned in plan.terms
    }
    rhs = float(sum(contributions.values()))
    return PointwiseCheck(lhs, rhs, _passes(lhs, rhs), contributions)

def dim1_listed_margin(model: FieldModel, n: int) -> Tuple[LatticeIndex, LatticeIndex]:
    """Atom box read by verify_dim1_listed_inequality."""
    lo, hi = [0], [0]
    _reach(model.f, (0,), (1,), (2 ** n,), lo, hi)
    for k in range(n + 1):
        _reach(u_k(model, k), (0,), (2 ** (k + 1),), (2 ** max(n - k - 1, 0),), lo, hi)
    for k in range(n):
        _reach(d_k(model, k), (0,), (2 ** (k + 1),), (2 ** (n - k - 1),), lo, hi)
    return tuple(lo), tuple(hi)

def verify_dim1_listed_inequality(model: FieldModel, n: int, realization: Realization) -> PointwiseCheck:
    """
    The one-dimensional bound in its listed form:

        |f - E_{-1} f| partial sums + sum_{k<n} d_k block sums at step 2^{k+1}
        + |u_n| + sum_{k<n} max_{1 <= l <= 2^{n-k-1} - 1} |u_k| o T^{2^{k+1} l}

    The u_k maxima start at l = 1, so the bound can fail (f = xi_{-1}, n = 1);
    results are recorded, never binding.
    """
    lhs = max_partial_sum(model, (n,), realization)
    contributions = {}

    f = model.f
    martingale = f - conditional_projection(f, (-1,))
    grid = evaluate_grid(martingale, realization, (0,), (2 ** n,))
    contributions['martingale'] = float(np.max(np.abs(np.cumsum(grid))))

    for k in range(n):
        grid = evaluate_grid(d_k(model, k), realization, (0,), (2 ** (n - k - 1),), (2 ** (k + 1),))
        contributions[f'd_{k}'] = float(np.max(np.abs(np.cumsum(grid))))
        count = 2 ** (n - k - 1) - 1
        if count >= 1:
            grid = evaluate_grid(u_k(model, k), realization, (2 ** (k + 1),), (count,), (2 ** (k + 1),))
            contributions[f'u_{k}'] = float(np.max(np.abs(grid)))
    contributions[f'u_{n}'] = abs(float(evaluate_grid(u_k(model, n), realization, (0,), (1,))[0]))

    rhs = float(sum(contributions.values()))
    return PointwiseCheck(lhs, rhs, _passes(lhs, rhs), contributions)
