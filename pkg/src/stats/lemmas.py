"""
Exact checkers for the auxiliary probabilistic lemmas: Orlicz power and
scaling comparisons, the dyadic series bounds and the weak-type estimate.
"""

import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.core.error_handler import ConfigError, DomainError
from src.core.logger import get_logger
from src.stats.laws import DiscreteLaw
from src.stats.norms import OrliczParams, orlicz_norm

logger = get_logger(__name__)

EXACT_RTOL = 1e-12

@dataclass(frozen=True)
class PowerLemmaResult:
    """Ratios ||X^2||_{1,r} / ||X||_{2,r}^2 and ||X^{1/2}||_{2,r} / ||X||_{1,r}^{1/2} per law."""
    r: float
    square_ratios: Tuple[float, ...]
    root_ratios: Tuple[float, ...]

    @property
    def max_square_ratio(self) -> float:
        return max(self.square_ratios, default=1.0)

    @property
    def max_root_ratio(self) -> float:
        return max(self.root_ratios, default=1.0)

    @property
    def empirical_constant(self) -> float:
        """Smallest c_r consistent with every law of the family."""
        return max(self.max_square_ratio, self.max_root_ratio)

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.square_ratios)) and np.all(np.isfinite(self.root_ratios)))

@dataclass(frozen=True)
class SeriesLemmaResult:
    lhs: float
    rhs_bound: float
    passed: bool
    companion_lhs: float
    companion_rhs: float
    companion_passed: bool

@dataclass(frozen=True)
class PairedLaw:
    """
    Joint law of two nonnegative variables on a finite probability space.

    Outcome k has probability weights[k] and values (x[k], y[k]).
    """
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        if not len(self.x) == len(self.y) == len(self.weights):
            raise ConfigError("Paired law components differ in length")
        if min(self.x, default=0) < 0 or min(self.y, default=0) < 0:
            raise ConfigError("Paired law components must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12 or min(self.weights, default=1) <= 0:
            raise ConfigError("Paired law weights must be positive and sum to 1")

    @classmethod
    def diagonal(cls, law: DiscreteLaw) -> 'PairedLaw':
        """Y = X for the magnitude of a law."""
        magnitude = law.abs()
        return cls(magnitude.values, magnitude.values, magnitude.probabilities)

    def marginals(self) -> Tuple[DiscreteLaw, DiscreteLaw]:
        return (DiscreteLaw.from_atoms(zip(self.x, self.weights)),
                DiscreteLaw.from_atoms(zip(self.y, self.weights)))

def doob_pair(n: int) -> PairedLaw:
    """
    X = max_{k <= n} |S_k| and Y = |S_n| for a simple random walk, enumerated
    over all 2^n sign paths. Doob's weak maximal inequality is exactly the
    weak-type hypothesis for this pair.
    """
    if n < 1:
        raise DomainError(f"Random walk length must be positive, got {n}")
    signs = np.array(list(itertools.product((-1, 1), repeat=n)), dtype=float)
    walks = np.cumsum(signs, axis=1)
    x = np.max(np.abs(walks), axis=1)
    y = np.abs(walks[:, -1])
    weight = 1.0 / signs.shape[0]
    return PairedLaw(tuple(x), tuple(y), (weight,) * signs.shape[0])

def check_orlicz_power_lemma(laws: Sequence[DiscreteLaw], r: float) -> PowerLemmaResult:
    """
    Compare Orlicz norms of powers over a family of laws.

    Laws that vanish almost surely carry no information and are skipped.
    """
    params_1 = OrliczParams(1.0, r)
    params_2 = OrliczParams(2.0, r)
    squares, roots = [], []
    for law in laws:
        magnitude = law.abs()
        norm_2 = orlicz_norm(magnitude, params_2)
        norm_1 = orlicz_norm(magnitude, params_1)
        if norm_2 == 0 or norm_1 == 0:
            continue
        squares.append(orlicz_norm(magnitude.power(2.0), params_1) / norm_2 ** 2)
        roots.append(orlicz_norm(magnitude.power(0.5), params_2) / norm_1 ** 0.5)
    result = PowerLemmaResult(r, tuple(squares), tuple(roots))
    logger.info(f"Power lemma r={r}: max square ratio {result.max_square_ratio:.6g}, "
                f"max root ratio {result.max_root_ratio:.6g} over {len(squares)} laws")
    return result

def check_orlicz_scaling_lemma(laws: Sequence[DiscreteLaw], params: OrliczParams, a: float) -> float:
    """Largest ||X||_phi / ||X||_{a phi} over the family: the empirical constant c(a, p, r)."""
    ratios = []
    for law in laws:
        scaled_norm = orlicz_norm(law, params, scale=a)
        if scaled_norm > 0:
            ratios.append(orlicz_norm(law, params) / scaled_norm)
    return max(ratios, default=1.0)

def _within(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1.0 + EXACT_RTOL)

def check_series_lemma(X: DiscreteLaw, p: float, q: float, k_max: int) -> SeriesLemmaResult:
    """
    Dyadic series bounds for a nonnegative law (magnitudes are used).

    lhs = sum_{k=1}^{k_max} 2^{kp} k^q P{X > 2^k / sqrt(k)}, bounded by
    (2/ln 2)^{q+p/2} E[X^p (ln X)^{q+p/2} 1{X > 1}].
    companion = sum_{k=1}^{k_max} 2^k k^q P{X > 2^{k/2}}, bounded by
    2 (2/ln 2)^q E[X^2 (ln X)^q 1{X > 1}].

    Raises:
        DomainError: If p < 1, q < 0 or k_max < 1
    """
    if p < 1 or q < 0 or k_max < 1:
        raise DomainError(f"Series lemma needs p >= 1, q >= 0, k_max >= 1; got p={p}, q={q}, k_max={k_max}")
    law = X.abs()
    values, weights = law.support, law.weights
    k = np.arange(1, k_max + 1, dtype=float)

    thresholds = 2.0 ** k / np.sqrt(k)
    tails = np.array([weights[values > t].sum() for t in thresholds])
    lhs = float(np.sum(2.0 ** (k * p) * k ** q * tails))
    above = values > 1
    constant = (2.0 / np.log(2.0)) ** (q + p / 2.0)
    rhs = constant * float(np.sum(weights[above] * values[above] ** p * np.log(values[above]) ** (q + p / 2.0)))

    companion_thresholds = 2.0 ** (k / 2.0)
    companion_tails = np.array([weights[values > t].sum() for t in companion_thresholds])
    companion_lhs = float(np.sum(2.0 ** k * k ** q * companion_tails))
    companion_constant = 2.0 * (2.0 / np.log(2.0)) ** q
    companion_rhs = companion_constant * float(
        np.sum(weights[above] * values[above] ** 2 * np.log(values[above]) ** q)
    )
    return SeriesLemmaResult(
        lhs, rhs, _within(lhs, rhs),
        companion_lhs, companion_rhs, _within(companion_lhs, companion_rhs)
    )

@dataclass(frozen=True)
class WeakTypeResult:
    t_grid: Tuple[float, ...]
    lhs: Tuple[float, ...]
    rhs: Tuple[float, ...]
    passed: Tuple[bool, ...]

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

def weak_type_hypothesis_holds(pair: PairedLaw) -> bool:
    """
    x P{X > x} <= E[Y 1{X >= x}] for every x > 0.

    On a finite space the gap is largest as x increases to a positive atom u
    of X, where it reads u P{X >= u} <= E[Y 1{X >= u}].
    """
    x = np.asarray(pair.x)
    y = np.asarray(pair.y)
    w = np.asarray(pair.weights)
    for u in np.unique(x[x > 0]):
        upper = x >= u
        lhs = u * w[upper].sum()
        rhs = float(np.sum(w[upper] * y[upper]))
        if not _within(lhs, rhs):
            return False
    return True

def check_weak_type_estimate(pair: PairedLaw, t_grid: Sequence[float]) -> WeakTypeResult:
    """
    P{X > 2t} <= int_1^inf P{Y > s t} ds = E[(Y - t)^+] / t at every t of the grid.

    Raises:
        ConfigError: If the pair violates the weak-type hypothesis
        DomainError: If a grid point is not positive
    """
    if not weak_type_hypothesis_holds(pair):
        raise ConfigError("Supplied pair does not satisfy the weak-type hypothesis")
    x = np.asarray(pair.x)
    y = np.asarray(pair.y)
    w = np.asarray(pair.weights)
    lhs_values, rhs_values, verdicts = [], [], []
    for t in t_grid:
        if t <= 0:
            raise DomainError(f"Weak-type grid points must be positive, got {t}")
        lhs = float(w[x > 2 * t].sum())
        rhs = float(np.sum(w * np.maximum(y - t, 0.0)) / t)
        lhs_values.append(lhs)
        rhs_values.append(rhs)
        verdicts.append(_within(lhs, rhs))
    return WeakTypeResult(tuple(float(t) for t in t_grid), tuple(lhs_values), tuple(rhs_values), tuple(verdicts))

def check_weak_type_to_orlicz(pairs: Sequence[PairedLaw], params: OrliczParams) -> float:
    """Largest ||X||_{p,r} / ||Y||_{p,r} over pairs satisfying the weak-type hypothesis."""
    ratios: List[float] = []
    for pair in pairs:
        if not weak_type_hypothesis_holds(pair):
            raise ConfigError("Supplied pair does not satisfy the weak-type hypothesis")
        law_x, law_y = pair.marginals()
        norm_y = orlicz_norm(law_y, params)
        if norm_y > 0:
            ratios.append(orlicz_norm(law_x, params) / norm_y)
    return max(ratios, default=1.0)
