"""
Hannan and Maxwell-Woodroofe type series of a field model, evaluated on the
exact laws of projected atom combinations.
"""

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import zeta

from config.experiment_kinds import InnovationKind
from src.core.error_handler import DomainError, SupportOverflowError
from src.core.logger import get_logger
from src.core.settings import SETTINGS
from src.fields.innovations import AtomCombination, InnovationModel, conditional_projection
from src.fields.models import FieldModel, symbolic_partial_sum
from src.lattice.geometry import LatticeIndex, as_index, zeros
from src.stats.laws import DiscreteLaw
from src.stats.norms import NormEstimate, OrliczParams, empirical_orlicz_norm, orlicz_norm

logger = get_logger(__name__)

EXACT_OUTCOMES = 2 ** SETTINGS['limits']['exact_enumeration_atoms']
FALLBACK_SAMPLES = SETTINGS['monte_carlo']['fallback_samples']

@dataclass(frozen=True, eq=False)
class CombinationLaw:
    """
    Law of an atom combination.

    method is 'exact' (enumeration), 'gaussian' (quadrature surrogate of a
    Gaussian combination) or 'monte_carlo' (empirical law of samples).
    """
    law: DiscreteLaw
    method: str
    samples: Optional[np.ndarray] = None

    def norm(self, params: OrliczParams, seed: int = 0) -> NormEstimate:
        if self.samples is None:
            return NormEstimate.exact(orlicz_norm(self.law, params))
        return empirical_orlicz_norm(self.samples, params, seed)

def _merge(values: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    values, inverse = np.unique(values.ravel(), return_inverse=True)
    return values, np.bincount(inverse.ravel(), weights=weights.ravel())

def _iid_exact(c: AtomCombination, atom: DiscreteLaw) -> Optional[DiscreteLaw]:
    """Convolution of the scaled atom laws, merging equal values; None past the budget."""
    values, weights = np.array([c.constant]), np.array([1.0])
    for coefficient in c.terms.values():
        values = np.add.outer(values, coefficient * atom.support)
        weights = np.multiply.outer(weights, atom.weights)
        values, weights = _merge(values, weights)
        if values.size > EXACT_OUTCOMES:
            return None
    return DiscreteLaw(tuple(values.tolist()), tuple((weights / weights.sum()).tolist()))

def _axis_coordinates(c: AtomCombination, d: int) -> Tuple[Dict[int, int], ...]:
    """Per axis, the coordinates used by c mapped to column positions."""
    return tuple(
        {t: p for p, t in enumerate(sorted({key[q] for key in c.terms}))}
        for q in range(d)
    )

def _product_exact(c: AtomCombination, innovation: InnovationModel) -> Optional[DiscreteLaw]:
    """Enumerate every assignment of the axis sequences on the coordinates c uses."""
    coordinates = _axis_coordinates(c, innovation.d)
    laws = [law.law() for law in innovation.laws]
    outcomes = math.prod(law.size ** len(coords) for law, coords in zip(laws, coordinates))
    if outcomes > EXACT_OUTCOMES:
        return None

    axis_values, axis_weights = [], []
    for law, coords in zip(laws, coordinates):
        choice = np.array(list(itertools.product(range(law.size), repeat=len(coords))), dtype=np.int64)
        axis_values.append(law.support[choice])
        axis_weights.append(np.prod(law.weights[choice], axis=1))

    total = np.full(tuple(len(w) for w in axis_weights), c.constant)
    for key, coefficient in c.terms.items():
        columns = [values[:, coords[t]] for values, coords, t in zip(axis_values, coordinates, key)]
        total = total + coefficient * functools.reduce(np.multiply.outer, columns)
    weights = functools.reduce(np.multiply.outer, axis_weights)
    values, weights = _merge(total, weights)
    return DiscreteLaw(tuple(values.tolist()), tuple((weights / weights.sum()).tolist()))

def _monte_carlo(c: AtomCombination, innovation: InnovationModel, seed: int, samples: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    keys = list(c.terms)
    coefficients = np.fromiter(c.terms.values(), dtype=float, count=len(keys))
    if innovation.kind == InnovationKind.IID:
        draws = innovation.laws[0].quantile(rng.random((samples, len(keys))))
        return c.constant + draws @ coefficients

    coordinates = _axis_coordinates(c, innovation.d)
    atoms = np.ones((samples, len(keys)))
    for q, (law, coords) in enumerate(zip(innovation.laws, coordinates)):
        draws = law.quantile(rng.random((samples, len(coords))))
        atoms *= draws[:, [coords[key[q]] for key in keys]]
    return c.constant + atoms @ coefficients

def combination_law(c: AtomCombination,
                    innovation: InnovationModel,
                    seed: int = 0,
                    monte_carlo: bool = True,
                    samples: Optional[int] = None) -> CombinationLaw:
    """
    Law of constant + sum_l c_l xi_l.

    Discrete innovations are enumerated exactly while the number of outcomes
    stays within 2^exact_enumeration_atoms; a Gaussian iid combination is
    N(constant, sum c_l^2), represented by its quadrature surrogate. Anything
    else is sampled.

    Raises:
        SupportOverflowError: If exact enumeration is too large and Monte Carlo is disabled
    """
    if not c.terms:
        return CombinationLaw(DiscreteLaw.constant(c.constant), 'exact')

    law = None
    if innovation.kind == InnovationKind.IID:
        marginal = innovation.laws[0]
        if marginal.is_gaussian:
            scale = math.sqrt(c.l2_norm_squared())
            surrogate = DiscreteLaw.gaussian().map(lambda x: c.constant + scale * x)
            return CombinationLaw(surrogate, 'gaussian')
        law = _iid_exact(c, marginal.law())
    elif not any(marginal.is_gaussian for marginal in innovation.laws):
        law = _product_exact(c, innovation)
    if law is not None:
        return CombinationLaw(law, 'exact')

    if not monte_carlo:
        raise SupportOverflowError(
            f"Law of a {len(c)}-atom combination exceeds {EXACT_OUTCOMES} outcomes and Monte Carlo is disabled"
        )
    count = samples or FALLBACK_SAMPLES
    logger.info(f"Sampling the law of a {len(c)}-atom combination with {count} draws")
    draws = _monte_carlo(c, innovation, seed, count)
    return CombinationLaw(DiscreteLaw.from_samples(draws), 'monte_carlo', draws)

@dataclass(frozen=True)
class MWTerm:
    """One distinct conditional expectation E[S_m(f) | F_0] and its norm."""
    m: LatticeIndex
    norm: NormEstimate
    method: str
    coefficient_part: float
    projection_l2: float

@dataclass(frozen=True)
class MWSeries:
    """
    sum_{1 <= n <= n_max} |n|^{-3/2} ||E[S_n(f) | F_0]||_{p,r} and its completion.

    E[S_n(f) | F_0] only depends on min(n, stabilization_index), so terms
    holds one entry per distinct value.
    """
    n_max: LatticeIndex
    params: OrliczParams
    partial_sum: float
    infinite_series: float
    stabilization_index: LatticeIndex
    coefficient_partial: float
    coefficient_series: float
    terms: Tuple[MWTerm, ...]

def coefficient_part(model: FieldModel, m: LatticeIndex) -> float:
    """(sum_{l >= 0} (sum_{0 <= i <= m - 1} a_{i + l})^2)^{1/2} from the coefficient table."""
    extent = model.extent
    dense = np.zeros(tuple(e + 1 for e in extent))
    for j, value in model.coefficient_map.items():
        dense[j] = value
    total = 0.0
    for offset in itertools.product(*(range(e + 1) for e in extent)):
        block = dense[tuple(slice(l, l + a) for l, a in zip(offset, m))]
        total += float(np.sum(block)) ** 2
    return math.sqrt(total)

def _axis_weights(limit: int, stable: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weights of E[S_m | F_0], m = 1..min(limit, stable), along one axis:
    m^{-3/2} below the stabilization index, the summed tail at it.
    Returns the truncated (n <= limit) and the infinite weights.
    """
    infinite = np.arange(1, stable + 1, dtype=float) ** -1.5
    infinite[-1] = float(zeta(1.5, stable))
    partial = np.arange(1, min(limit, stable) + 1, dtype=float) ** -1.5
    if limit >= stable:
        partial[-1] = float(np.sum(np.arange(stable, limit + 1, dtype=float) ** -1.5))
    return partial, infinite

def mw_series(model: FieldModel,
              n_max: LatticeIndex,
              params: Optional[OrliczParams] = None,
              seed: int = 0,
              monte_carlo: bool = True) -> MWSeries:
    """
    Maxwell-Woodroofe type series of a finitely supported model.

    The conditional expectation E[S_n(f) | F_0] keeps the atoms l <= 0 of
    S_n(f); it stops changing once n_q exceeds the coefficient extent on
    every axis, so the infinite series is a finite sum plus Hurwitz zeta tails.

    Args:
        model: Field model
        n_max: Last index of the partial sum, n_max >= 1
        params: Orlicz parameters, (2, 2(d - 1)) by default
        seed: Seed of the Monte Carlo fallback
        monte_carlo: Allow sampling when exact enumeration is too large

    Raises:
        DomainError: If n_max is not >= 1
        SupportOverflowError: If a law is too large and Monte Carlo is disabled
    """
    n_max = as_index(n_max)
    if len(n_max) != model.d or any(a < 1 for a in n_max):
        raise DomainError(f"n_max must be >= 1 in dimension {model.d}, got {n_max}")
    params = params or OrliczParams.for_dimension(model.d)
    stable = tuple(e + 1 for e in model.extent)
    atom_norm = orlicz_norm(model.innovation.atom_law(), params)

    weights = [_axis_weights(limit, s) for limit, s in zip(n_max, stable)]
    terms = []
    partial_sum = infinite_series = coefficient_partial = coefficient_series = 0.0
    for m in itertools.product(*(range(1, len(infinite) + 1) for _, infinite in weights)):
        projected = conditional_projection(symbolic_partial_sum(model, m), zeros(model.d))
        law = combination_law(projected, model.innovation, seed, monte_carlo)
        estimate = law.norm(params, seed)
        coefficients = coefficient_part(model, m)
        terms.append(MWTerm(m, estimate, law.method, coefficients, math.sqrt(projected.l2_norm_squared())))

        w_infinite = math.prod(infinite[a - 1] for (_, infinite), a in zip(weights, m))
        infinite_series += w_infinite * estimate.value
        coefficient_series += w_infinite * coefficients * atom_norm
        if all(a <= len(partial) for (partial, _), a in zip(weights, m)):
            w_partial = math.prod(partial[a - 1] for (partial, _), a in zip(weights, m))
            partial_sum += w_partial * estimate.value
            coefficient_partial += w_partial * coefficients * atom_norm

    logger.info(
        f"MW series up to {n_max}: {partial_sum:.6g}, complete {infinite_series:.6g}, "
        f"stabilizes at {stable}"
    )
    return MWSeries(n_max, params, partial_sum, infinite_series, stable,
                    coefficient_partial, coefficient_series, tuple(terms))

def hannan_series(model: FieldModel, params: Optional[OrliczParams] = None) -> float:
    """
    sum_j ||pi_j(f)||_{p,r} = sum_j |a_j| ||m||_{p,r}, with pi_{-j}(f) = a_j xi_{-j}.
    """
    params = params or OrliczParams.for_dimension(model.d)
    total = sum(abs(value) for value in model.coefficient_map.values())
    if total == 0:
        return 0.0
    return float(total * orlicz_norm(model.innovation.atom_law(), params))
