"""
Exact finitely supported laws.

DiscreteLaw is the substrate of every exact norm computation. Continuous
innovations enter through surrogates with matching low moments (Gauss-Hermite
nodes for the standard Gaussian).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from src.core.error_handler import ModelError, NormError
from src.core.settings import SETTINGS

LAW_ATOL = SETTINGS['numerics']['law_atol']

@dataclass(frozen=True)
class DiscreteLaw:
    """
    Law with finitely many atoms.

    Args:
        values: Sorted distinct atom values
        probabilities: Matching positive probabilities summing to 1
    """
    values: Tuple[float, ...]
    probabilities: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise NormError("A law needs at least one atom")
        if len(self.values) != len(self.probabilities):
            raise ModelError("Atom values and probabilities differ in length")
        probs = np.asarray(self.probabilities, dtype=float)
        if np.any(~(probs > 0)):
            raise ModelError("Atom probabilities must be positive")
        if abs(probs.sum() - 1.0) > LAW_ATOL:
            raise ModelError(f"Atom probabilities sum to {probs.sum():.17g}, not 1")
        if not np.all(np.isfinite(np.asarray(self.values, dtype=float))):
            raise NormError("Atom values must be finite")

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[float, float]]) -> 'DiscreteLaw':
        """Build a law from (value, probability) pairs, merging equal values."""
        merged = {}
        for value, prob in atoms:
            merged[float(value)] = merged.get(float(value), 0.0) + float(prob)
        values = tuple(sorted(merged))
        return cls(values, tuple(merged[v] for v in values))

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> 'DiscreteLaw':
        """Empirical law putting mass 1/n on each sample."""
        samples = np.asarray(samples, dtype=float).ravel()
        if samples.size == 0:
            raise NormError("Empirical law of an empty sample")
        if not np.all(np.isfinite(samples)):
            raise NormError("Empirical sample contains NaN or infinite values")
        values, counts = np.unique(samples, return_counts=True)
        return cls(tuple(values.tolist()), tuple((counts / samples.size).tolist()))

    @classmethod
    def constant(cls, c: float) -> 'DiscreteLaw':
        return cls((float(c),), (1.0,))

    @classmethod
    def rademacher(cls) -> 'DiscreteLaw':
        return cls((-1.0, 1.0), (0.5, 0.5))

    @classmethod
    def two_point(cls, p: float) -> 'DiscreteLaw':
        """Centered unit-variance law with mass p at sqrt((1-p)/p)."""
        if not 0 < p < 1:
            raise ModelError(f"Two-point weight must lie in (0, 1), got {p}")
        high = np.sqrt((1 - p) / p)
        low = -np.sqrt(p / (1 - p))
        return cls((float(low), float(high)), (1 - p, p))

    @classmethod
    def gaussian(cls, nodes: int = None) -> 'DiscreteLaw':
        """Gauss-Hermite surrogate of N(0, 1), exact for polynomial moments up to 2*nodes - 1."""
        nodes = nodes or SETTINGS['numerics']['gauss_hermite_nodes']
        x, w = hermegauss(nodes)
        return cls.from_atoms(zip(x, w / w.sum()))

    @classmethod
    def heavy_tail(cls, levels: int = 13) -> 'DiscreteLaw':
        """Symmetric law on +-2^k, k < levels, with weights 2^{-2k}/(k+1)^{3/2}, rescaled to unit variance."""
        k = np.arange(levels, dtype=float)
        weights = 2.0 ** (-2 * k) / (k + 1) ** 1.5
        weights /= weights.sum()
        scale = 1.0 / np.sqrt(np.sum(weights * 4.0 ** k))
        atoms = [(sign * scale * 2.0 ** j, wj / 2) for j, wj in zip(k, weights) for sign in (-1, 1)]
        return cls.from_atoms(atoms)

    @cached_property
    def support(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.asarray(self.probabilities, dtype=float)

    @property
    def size(self) -> int:
        return len(self.values)

    def expect(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.sum(self.weights * func(self.support)))

    @property
    def mean(self) -> float:
        return self.expect(lambda x: x)

    @property
    def variance(self) -> float:
        mean = self.mean
        return self.expect(lambda x: (x - mean) ** 2)

    def is_centered(self, tol: float = LAW_ATOL) -> bool:
        return abs(self.mean) <= tol

    def map(self, func: Callable[[np.ndarray], np.ndarray]) -> 'DiscreteLaw':
        """Law of func(X)."""
        return DiscreteLaw.from_atoms(zip(func(self.support), self.weights))

    def abs(self) -> 'DiscreteLaw':
        return self.map(np.abs)

    def scaled(self, c: float) -> 'DiscreteLaw':
        return self.map(lambda x: c * x)

    def power(self, a: float) -> 'DiscreteLaw':
        """Law of |X|^a."""
        return self.map(lambda x: np.abs(x) ** a)

    def standardized(self) -> 'DiscreteLaw':
        """Rescale to unit variance. The law must already be centered."""
        if not self.is_centered():
            raise ModelError(f"Law is not centered: mean {self.mean:.3e}")
        variance = self.variance
        if variance <= 0:
            raise ModelError("Degenerate law cannot be rescaled to unit variance")
        return self.scaled(1.0 / np.sqrt(variance))

    def refined(self, relative: float = 1e-3) -> 'DiscreteLaw':
        """Split every atom v into v(1 - relative) and v(1 + relative) with half the mass each."""
        atoms = []
        for v, p in zip(self.values, self.probabilities):
            atoms.append((v * (1 - relative), p / 2))
            atoms.append((v * (1 + relative), p / 2))
        return DiscreteLaw.from_atoms(atoms)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Inverse distribution function evaluated at u in (0, 1)."""
        cdf = np.cumsum(self.weights)
        index = np.searchsorted(cdf, u, side='right')
        return self.support[np.minimum(index, self.size - 1)]

def stress_family(count: int = 20, seed: int = 20240607) -> List[DiscreteLaw]:
    """
    Deterministic family of laws for lemma checks.

    The first members are named shapes (constants, symmetric, skewed, heavy
    tailed, Gaussian surrogate); the rest are random laws with 2 to 8 atoms
    whose magnitudes span several orders.
    """
    named = [
        DiscreteLaw.constant(1.0),
        DiscreteLaw.constant(3.5),
        DiscreteLaw.rademacher(),
        DiscreteLaw.two_point(0.1),
        DiscreteLaw.two_point(0.01),
        DiscreteLaw.heavy_tail(),
        DiscreteLaw.gaussian(),
        DiscreteLaw.from_atoms([(0.0, 0.5), (1.0, 0.5)]),
    ]
    rng = np.random.default_rng(seed)
    laws = named[:count]
    while len(laws) < count:
        atoms = int(rng.integers(2, 9))
        values = np.exp(rng.normal(0.0, 2.0, size=atoms))
        values[rng.random(atoms) < 0.2] = 0.0
        probs = rng.dirichlet(np.ones(atoms))
        laws.append(DiscreteLaw.from_atoms(zip(values, probs)))
    return laws
