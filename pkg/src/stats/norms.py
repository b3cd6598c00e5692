"""
L^p, weak-L^p and Orlicz (Luxemburg) norms on exact laws and empirical samples.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from src.core.error_handler import DomainError, NormError, handle_numeric_error
from src.core.logger import get_logger
from src.core.settings import SETTINGS
from src.stats.laws import DiscreteLaw

logger = get_logger(__name__)

NUMERICS = SETTINGS['numerics']
MONTE_CARLO = SETTINGS['monte_carlo']

LawOrSamples = Union[DiscreteLaw, Sequence[float], np.ndarray]

@dataclass(frozen=True)
class OrliczParams:
    """Parameters of phi_{p,r}(x) = x^p (1 + ln(1 + x))^r."""
    p: float
    r: float = 0.0

    def __post_init__(self):
        if not self.p >= 1:
            raise DomainError(f"Orlicz exponent p must be >= 1, got {self.p}")
        if not self.r >= 0:
            raise DomainError(f"Orlicz log exponent r must be >= 0, got {self.r}")

    @classmethod
    def for_dimension(cls, d: int) -> 'OrliczParams':
        """(2, 2(d-1)), the integrability index of the bounded LIL in dimension d."""
        return cls(2.0, 2.0 * (d - 1))

@dataclass(frozen=True)
class NormEstimate:
    """Norm or probability estimate with its confidence interval."""
    value: float
    ci_lo: float
    ci_hi: float
    replications: int
    seed: Optional[int] = None
    method: str = 'exact'

    @classmethod
    def exact(cls, value: float) -> 'NormEstimate':
        return cls(value, value, value, 0, None, 'exact')

class WeakLpNorms(NamedTuple):
    dual_norm: float
    tail_sup: float

def phi(x: Union[float, np.ndarray], params: OrliczParams) -> Union[float, np.ndarray]:
    """
    phi_{p,r}(x) = x^p (1 + ln(1 + x))^r, strictly increasing and convex on [0, inf).

    Raises:
        DomainError: If any x < 0
    """
    values = np.asarray(x, dtype=float)
    if np.any(values < 0):
        raise DomainError(f"phi is defined on [0, inf), got {x}")
    with np.errstate(over='ignore'):
        result = values ** params.p * (1.0 + np.log1p(values)) ** params.r
    return float(result) if result.ndim == 0 else result

def _magnitudes(X: LawOrSamples) -> Tuple[np.ndarray, np.ndarray]:
    """(|values|, weights) of a law or of an empirical sample."""
    if isinstance(X, DiscreteLaw):
        return np.abs(X.support), X.weights
    samples = np.asarray(X, dtype=float).ravel()
    if samples.size == 0:
        raise NormError("Norm of an empty sample")
    if not np.all(np.isfinite(samples)):
        raise NormError("Sample contains NaN or infinite values")
    return np.abs(samples), np.full(samples.size, 1.0 / samples.size)

def lp_norm(X: LawOrSamples, p: float) -> float:
    """(E|X|^p)^{1/p}."""
    if not p >= 1:
        raise DomainError(f"L^p norm needs p >= 1, got {p}")
    values, weights = _magnitudes(X)
    return float(np.sum(weights * values ** p) ** (1.0 / p))

def orlicz_modular(values: np.ndarray, weights: np.ndarray, params: OrliczParams,
                   scale: float = 1.0) -> Callable[[float], float]:
    """g(lambda) = E[scale * phi(|X| / lambda)], strictly decreasing in lambda for nonzero X."""
    def g(lam: float) -> float:
        with np.errstate(over='ignore'):
            scaled = values / lam
            return scale * float(np.sum(weights * scaled ** params.p * (1.0 + np.log1p(scaled)) ** params.r))
    return g

@handle_numeric_error(NormError)
def orlicz_norm(X: LawOrSamples, params: OrliczParams, scale: float = 1.0) -> float:
    """
    Luxemburg norm inf{lambda > 0 : E[scale * phi(|X| / lambda)] <= 1}.

    For r = 0 this is the L^p norm, returned in closed form. Otherwise the
    root of g(lambda) = 1 is bracketed geometrically and bisected.

    Args:
        X: Exact law or empirical sample
        params: Orlicz parameters
        scale: Positive multiple a of the Young function (norm of a * phi)

    Returns:
        float: The norm, 0 for X = 0 almost surely

    Raises:
        NormError: On NaN/inf input or if the bracket cannot be found
    """
    values, weights = _magnitudes(X)
    if not np.any(values > 0):
        return 0.0
    if scale <= 0:
        raise DomainError(f"Young function multiple must be positive, got {scale}")
    if params.r == 0:
        return float((scale * np.sum(weights * values ** params.p)) ** (1.0 / params.p))

    g = orlicz_modular(values, weights, params, scale)
    lam_hi = 2.0 * max(1.0, float(values.max()))
    lam_lo = lam_hi * 2.0 ** -NUMERICS['orlicz_bracket_exponent']
    for _ in range(NUMERICS['orlicz_max_expansions']):
        if g(lam_hi) <= 1.0:
            break
        lam_hi *= 2.0
    else:
        raise NormError("Could not find an upper bracket for the Luxemburg norm")
    for _ in range(NUMERICS['orlicz_max_expansions']):
        if g(lam_lo) >= 1.0:
            break
        lam_lo /= 2.0
    else:
        raise NormError("Could not find a lower bracket for the Luxemburg norm")

    root = bisect(
        lambda lam: g(lam) - 1.0,
        lam_lo,
        lam_hi,
        xtol=lam_lo * 1e-6,
        rtol=NUMERICS['orlicz_rtol'],
        maxiter=1000
    )
    return float(root)

def weak_lp_norms(X: LawOrSamples, p: float) -> WeakLpNorms:
    """
    Dual weak-L^p norm and tail supremum of a law.

    dual_norm = sup_A P(A)^{1/p - 1} E[|X| 1_A]. Along a linear piece of the
    upper-quantile integral the objective is quasi-convex, so the supremum
    sits on an upper level set {|X| >= v}. tail_sup^p = sup_t t^p P(|X| > t)
    is approached as t increases to an atom v and equals max_v v^p P(|X| >= v).

    Raises:
        DomainError: If p is outside (1, 2]
        NormError: On an empty law
    """
    if not 1 < p <= 2:
        raise DomainError(f"Weak L^p norms need p in (1, 2], got {p}")
    values, weights = _magnitudes(X)
    order = np.argsort(-values, kind='stable')
    values, weights = values[order], weights[order]

    # merge equal magnitudes so level sets are whole
    distinct, starts = np.unique(-values, return_index=True)
    level_values = -distinct
    level_mass = np.add.reduceat(weights, starts)

    cumulative_mass = np.cumsum(level_mass)
    cumulative_expectation = np.cumsum(level_values * level_mass)
    dual = float(np.max(cumulative_mass ** (1.0 / p - 1.0) * cumulative_expectation))
    tail = float(np.max(level_values ** p * cumulative_mass) ** (1.0 / p))
    return WeakLpNorms(dual, tail)

def _bootstrap_interval(values: np.ndarray, statistic: Callable[[np.ndarray], float],
                        seed: int, resamples: int, confidence: float) -> Tuple[float, float]:
    rng = np.random.default_rng(seed)
    stats = np.array([
        statistic(values[rng.integers(0, values.size, values.size)])
        for _ in range(resamples)
    ])
    alpha = (1.0 - confidence) / 2.0
    return float(np.quantile(stats, alpha)), float(np.quantile(stats, 1.0 - alpha))

def empirical_lp_norm(samples: Sequence[float], p: float, seed: int = 0,
                      method: str = 'bootstrap', resamples: Optional[int] = None) -> NormEstimate:
    """
    (mean |x|^p)^{1/p} with a confidence interval.

    Args:
        samples: Observed values
        p: Exponent >= 1
        seed: Seed of the bootstrap resampling
        method: 'bootstrap' (percentile interval) or 'normal' (delta method)
        resamples: Bootstrap resamples, config default when omitted

    Raises:
        DomainError: If p < 1
        NormError: On empty or non-finite input
    """
    if not p >= 1:
        raise DomainError(f"L^p norm needs p >= 1, got {p}")
    values, _ = _magnitudes(samples)
    powered = values ** p
    value = float(np.mean(powered) ** (1.0 / p))
    confidence = MONTE_CARLO['confidence']

    if method == 'normal':
        z = norm.ppf(0.5 + confidence / 2.0)
        se = float(np.std(powered, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
        mean = float(np.mean(powered))
        lo = max(mean - z * se, 0.0) ** (1.0 / p)
        hi = (mean + z * se) ** (1.0 / p)
        return NormEstimate(value, lo, hi, values.size, seed, 'normal')

    lo, hi = _bootstrap_interval(
        powered,
        lambda x: float(np.mean(x) ** (1.0 / p)),
        seed,
        resamples or MONTE_CARLO['bootstrap_resamples'],
        confidence
    )
    return NormEstimate(value, min(lo, value), max(hi, value), values.size, seed, 'bootstrap')

def empirical_orlicz_norm(samples: Sequence[float], params: OrliczParams, seed: int = 0,
                          resamples: Optional[int] = None) -> NormEstimate:
    """Luxemburg norm of the empirical measure with a bootstrap interval."""
    values, _ = _magnitudes(samples)
    value = orlicz_norm(values, params)
    lo, hi = _bootstrap_interval(
        values,
        lambda x: orlicz_norm(x, params),
        seed,
        resamples or MONTE_CARLO['bootstrap_resamples'],
        MONTE_CARLO['confidence']
    )
    return NormEstimate(value, min(lo, value), max(hi, value), values.size, seed, 'bootstrap')
