"""
Symbolic algebra of innovation atoms.

An AtomCombination is a finite linear combination of atoms xi_l (one per
lattice site l) plus a constant. The sigma-algebra T^{-i} F_0 is generated by
the atoms at sites l <= i, and atoms are independent and centered, so
conditional expectation given T^{-i} F_0 is truncation to the sites l <= i.
The same rule is exact for product innovations, whose atoms are products of
independent per-axis sequences.
"""

from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from config.experiment_kinds import InnovationKind, LawKind
from src.core.error_handler import ModelError, SupportOverflowError
from src.core.settings import SETTINGS
from src.lattice.geometry import LatticeIndex, as_index, lattice_add, precedes
from src.stats.laws import DiscreteLaw

SUPPORT_CAP = SETTINGS['limits']['support_cap']

@dataclass(frozen=True)
class MarginalLaw:
    """
    Descriptor of a centered unit-variance innovation law.

    Args:
        kind: Law family
        p: Weight of the upper atom (two_point only)
        atoms: (value, probability) pairs (discrete only), rescaled to unit variance
    """
    kind: LawKind
    p: float = 0.5
    atoms: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', LawKind(self.kind))
        if self.kind == LawKind.DISCRETE:
            law = DiscreteLaw.from_atoms(self.atoms)
            if not law.is_centered():
                raise ModelError(f"Innovation law is not centered: mean {law.mean:.3e}")
            law = law.standardized()
            object.__setattr__(self, 'atoms', tuple(zip(law.values, law.probabilities)))
        elif self.kind == LawKind.TWO_POINT and not 0 < self.p < 1:
            raise ModelError(f"Two-point weight must lie in (0, 1), got {self.p}")

    @property
    def is_gaussian(self) -> bool:
        return self.kind == LawKind.GAUSSIAN

    def law(self) -> DiscreteLaw:
        """Exact law, or the Gauss-Hermite surrogate for the Gaussian."""
        if self.kind == LawKind.RADEMACHER:
            return DiscreteLaw.rademacher()
        if self.kind == LawKind.GAUSSIAN:
            return DiscreteLaw.gaussian()
        if self.kind == LawKind.TWO_POINT:
            return DiscreteLaw.two_point(self.p)
        if self.kind == LawKind.HEAVY_TAIL:
            return DiscreteLaw.heavy_tail()
        return DiscreteLaw.from_atoms(self.atoms)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in (0, 1) to variates of this law."""
        if self.is_gaussian:
            return norm.ppf(u)
        return self._discrete.quantile(u)

    @cached_property
    def _discrete(self) -> DiscreteLaw:
        return self.law()

@dataclass(frozen=True)
class InnovationModel:
    """
    Source of innovation atoms.

    iid: one law, independent atoms at every site.
    product: d axis laws, atom at l equal to prod_q e_q(l_q).
    """
    kind: InnovationKind
    laws: Tuple[MarginalLaw, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, 'kind', InnovationKind(self.kind))
        object.__setattr__(self, 'laws', tuple(self.laws))
        if self.d < 1:
            raise ModelError(f"Dimension must be at least 1, got {self.d}")
        expected = 1 if self.kind == InnovationKind.IID else self.d
        if len(self.laws) != expected:
            raise ModelError(f"{self.kind.value} innovations need {expected} laws, got {len(self.laws)}")

    @classmethod
    def iid(cls, law: MarginalLaw, d: int) -> 'InnovationModel':
        return cls(InnovationKind.IID, (law,), d)

    @classmethod
    def product(cls, laws: Sequence[MarginalLaw]) -> 'InnovationModel':
        return cls(InnovationKind.PRODUCT, tuple(laws), len(laws))

    def atom_law(self) -> DiscreteLaw:
        """Law of a single atom (product of the axis laws for product innovations)."""
        law = self.laws[0].law()
        for other in self.laws[1:]:
            inner = other.law()
            law = DiscreteLaw.from_atoms(
                (a * b, p * q)
                for a, p in zip(law.values, law.probabilities)
                for b, q in zip(inner.values, inner.probabilities)
            )
        return law

class AtomCombination:
    """
    Immutable sparse linear combination of innovation atoms.

    No stored coefficient is exactly zero. Two combinations are equal iff
    their term tables and constants are equal.
    """

    __slots__ = ('_terms', '_constant', '_hash')

    def __init__(self, terms: Optional[Mapping[LatticeIndex, float]] = None, constant: float = 0.0):
        cleaned = {}
        for key, value in (terms or {}).items():
            if value != 0:
                cleaned[as_index(key)] = float(value)
        if len(cleaned) > SUPPORT_CAP:
            raise SupportOverflowError(f"Combination with {len(cleaned)} terms exceeds cap {SUPPORT_CAP}")
        self._terms = cleaned
        self._constant = float(constant)
        self._hash = None

    @classmethod
    def atom(cls, site: LatticeIndex, coefficient: float = 1.0) -> 'AtomCombination':
        return cls({as_index(site): coefficient})

    @classmethod
    def empty(cls) -> 'AtomCombination':
        return cls()

    @classmethod
    def from_dense(cls, lo: LatticeIndex, coefficients: np.ndarray, constant: float = 0.0) -> 'AtomCombination':
        """Inverse of to_dense: coefficients[p] is the coefficient of site lo + p."""
        positions = np.argwhere(coefficients != 0)
        terms = {
            tuple(int(a) + b for a, b in zip(lo, p)): coefficients[tuple(p)]
            for p in positions
        }
        return cls(terms, constant)

    @property
    def terms(self) -> Mapping[LatticeIndex, float]:
        return MappingProxyType(self._terms)

    @property
    def constant(self) -> float:
        return self._constant

    @property
    def d(self) -> Optional[int]:
        for key in self._terms:
            return len(key)
        return None

    def support(self) -> Tuple[LatticeIndex, ...]:
        return tuple(sorted(self._terms))

    def coefficient(self, site: LatticeIndex) -> float:
        return self._terms.get(as_index(site), 0.0)

    def is_empty(self) -> bool:
        return not self._terms and self._constant == 0

    def bounding_box(self) -> Optional[Tuple[LatticeIndex, LatticeIndex]]:
        """(lowest, highest) corner of the support, or None when there are no terms."""
        if not self._terms:
            return None
        keys = np.array(list(self._terms), dtype=np.int64)
        return as_index(keys.min(axis=0)), as_index(keys.max(axis=0))

    def to_dense(self) -> Tuple[LatticeIndex, np.ndarray]:
        """Dense coefficient array over the bounding box and its low corner."""
        lo, hi = self.bounding_box()
        array = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)), dtype=float)
        for key, value in self._terms.items():
            array[tuple(k - l for k, l in zip(key, lo))] = value
        return lo, array

    def l2_norm_squared(self) -> float:
        return float(sum(v * v for v in self._terms.values()))

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: 'AtomCombination') -> 'AtomCombination':
        merged = dict(self._terms)
        for key, value in other._terms.items():
            merged[key] = merged.get(key, 0.0) + value
        return AtomCombination(merged, self._constant + other._constant)

    def __neg__(self) -> 'AtomCombination':
        return AtomCombination({k: -v for k, v in self._terms.items()}, -self._constant)

    def __sub__(self, other: 'AtomCombination') -> 'AtomCombination':
        return self + (-other)

    def __mul__(self, scalar: float) -> 'AtomCombination':
        return AtomCombination({k: scalar * v for k, v in self._terms.items()}, scalar * self._constant)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomCombination):
            return NotImplemented
        return self._terms == other._terms and self._constant == other._constant

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._terms.items()), self._constant))
        return self._hash

    def isclose(self, other: 'AtomCombination', atol: float = 1e-12) -> bool:
        """Equality up to an absolute tolerance on every coefficient."""
        keys = set(self._terms) | set(other._terms)
        return abs(self._constant - other._constant) <= atol and all(
            abs(self.coefficient(k) - other.coefficient(k)) <= atol for k in keys
        )

    def __repr__(self) -> str:
        body = ', '.join(f"{k}: {v:g}" for k, v in sorted(self._terms.items()))
        if self._constant:
            body = f"{body}; const={self._constant:g}"
        return f"AtomCombination({{{body}}})"

def combination_sum(parts: Iterable[AtomCombination]) -> AtomCombination:
    """Sum of many combinations with a single merge."""
    merged: Dict[LatticeIndex, float] = {}
    constant = 0.0
    for part in parts:
        for key, value in part.terms.items():
            merged[key] = merged.get(key, 0.0) + value
        constant += part.constant
    return AtomCombination(merged, constant)

def shift(c: AtomCombination, i: LatticeIndex) -> AtomCombination:
    """U^i: every key l becomes l + i."""
    i = as_index(i)
    if not any(i):
        return c
    return AtomCombination({lattice_add(k, i): v for k, v in c.terms.items()}, c.constant)

def conditional_projection(c: AtomCombination, i: Sequence[Optional[int]]) -> AtomCombination:
    """
    E[c | T^{-i} F_0]: keep the terms with key l <= i, and the constant.

    A None coordinate means no truncation on that axis.
    """
    return AtomCombination(
        {k: v for k, v in c.terms.items() if all(b is None or a <= b for a, b in zip(k, i))},
        c.constant
    )

def axis_projection(c: AtomCombination, q: int, t: int) -> AtomCombination:
    """Conditional expectation along axis q only: keep the terms with l_q <= t."""
    return AtomCombination({k: v for k, v in c.terms.items() if k[q] <= t}, c.constant)

def hannan_projector(c: AtomCombination, j: LatticeIndex) -> AtomCombination:
    """
    pi_j(c) = prod_q (E^{(q)}_{j_q} - E^{(q)}_{j_q - 1}) c.

    The per-axis differences annihilate the constant and, under truncation,
    leave exactly the term at site j.
    """
    j = as_index(j)
    result = c
    for q, jq in enumerate(j):
        result = axis_projection(result, q, jq) - axis_projection(result, q, jq - 1)
    return result

def is_measurable(c: AtomCombination, i: LatticeIndex) -> bool:
    """Whether c is T^{-i} F_0 measurable in the truncation sense."""
    return all(precedes(k, i) for k in c.terms)

def box_shift_sum(c: AtomCombination, n: LatticeIndex) -> AtomCombination:
    """
    Sum of shift(c, i) over 0 <= i <= n - 1.

    Done on the dense coefficient box, one axis at a time; integer
    coefficients cancel exactly.
    """
    n = as_index(n)
    if not c.terms:
        return AtomCombination({}, c.constant * float(np.prod(n)))
    lo, hi = c.bounding_box()
    extent = [h - l + 1 + m - 1 for l, h, m in zip(lo, hi, n)]
    if float(np.prod(np.asarray(extent, dtype=float))) > SUPPORT_CAP:
        raise SupportOverflowError(
            f"Partial sum over {n} of a combination spanning {lo}..{hi} exceeds cap {SUPPORT_CAP}"
        )
    lo, dense = c.to_dense()
    for q, m in enumerate(n):
        widened_shape = list(dense.shape)
        widened_shape[q] += m - 1
        widened = np.zeros(widened_shape, dtype=float)
        for t in range(m):
            index = [slice(None)] * dense.ndim
            index[q] = slice(t, t + dense.shape[q])
            widened[tuple(index)] += dense
        dense = widened
    return AtomCombination.from_dense(lo, dense, c.constant * float(np.prod(n)))
