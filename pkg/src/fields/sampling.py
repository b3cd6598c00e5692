"""
Counter-based sampling of innovation atoms.

Every atom value is a pure function of (seed, axis tag, site): the site
coordinates are hashed into a 64-bit counter, turned into a uniform and pushed
through the inverse distribution function of the law. Realizations over
different boxes therefore agree on their overlap, whatever the evaluation
order or thread schedule.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config.experiment_kinds import InnovationKind
from src.core.error_handler import MarginError, SupportOverflowError
from src.core.settings import SETTINGS
from src.fields.innovations import AtomCombination, InnovationModel
from src.lattice.geometry import LatticeIndex, Window, as_index, lattice_add

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
FMIX_1 = np.uint64(0xFF51AFD7ED558CCD)
FMIX_2 = np.uint64(0xC4CEB9FE1A85EC53)
IID_TAG = 0

def fmix64(h: np.ndarray) -> np.ndarray:
    """murmur3 64-bit finalizer on uint64 arrays (wrapping arithmetic)."""
    with np.errstate(all='ignore'):
        h = h ^ (h >> np.uint64(33))
        h = h * FMIX_1
        h = h ^ (h >> np.uint64(33))
        h = h * FMIX_2
        h = h ^ (h >> np.uint64(33))
    return h

def site_hash(seed: int, tag: int, coords: Sequence[np.ndarray]) -> np.ndarray:
    """
    Hash (seed, tag, coordinates) into uint64 counters.

    Args:
        seed: Master seed, reduced modulo 2^64
        tag: Stream tag (0 for iid atoms, q + 1 for the axis-q sequence)
        coords: Broadcastable integer arrays, one per axis

    Returns:
        np.ndarray: uint64 hashes with the broadcast shape of coords
    """
    shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
    with np.errstate(all='ignore'):
        key = np.uint64(int(seed) & MASK64) ^ (np.uint64(tag) * GOLDEN)
        h = fmix64(np.full(shape, key, dtype=np.uint64))
        for c in coords:
            word = np.asarray(c, dtype=np.int64).view(np.uint64)
            h = fmix64(h ^ fmix64(word + GOLDEN))
    return h

def to_uniform(h: np.ndarray) -> np.ndarray:
    """Top 53 bits of the hash as a uniform in the open interval (0, 1)."""
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

@dataclass(frozen=True, eq=False)
class Realization:
    """
    Sampled atom values on the box lo <= l <= lo + shape - 1.

    axis_values holds the per-axis sequences of a product realization,
    aligned with the box.
    """
    innovation: InnovationModel
    seed: int
    lo: LatticeIndex
    atoms: np.ndarray
    axis_values: Optional[Tuple[np.ndarray, ...]] = None

    @property
    def hi(self) -> LatticeIndex:
        return tuple(l + s - 1 for l, s in zip(self.lo, self.atoms.shape))

    def covers(self, lo: LatticeIndex, hi: LatticeIndex) -> bool:
        return all(a >= b for a, b in zip(lo, self.lo)) and all(a <= b for a, b in zip(hi, self.hi))

    def _require(self, lo: LatticeIndex, hi: LatticeIndex):
        if not self.covers(lo, hi):
            raise MarginError(
                f"Atoms {tuple(lo)}..{tuple(hi)} requested outside sampled box {self.lo}..{self.hi}"
            )

    def value_at(self, site: LatticeIndex) -> float:
        site = as_index(site)
        self._require(site, site)
        return float(self.atoms[tuple(a - b for a, b in zip(site, self.lo))])

    def values_at(self, sites: np.ndarray) -> np.ndarray:
        """Atom values at an (m, d) array of sites."""
        sites = np.asarray(sites, dtype=np.int64).reshape(-1, len(self.lo))
        if sites.shape[0] == 0:
            return np.zeros(0)
        self._require(as_index(sites.min(axis=0)), as_index(sites.max(axis=0)))
        offsets = sites - np.asarray(self.lo, dtype=np.int64)
        return self.atoms[tuple(offsets.T)]

    def translated(self, i: LatticeIndex) -> 'Realization':
        """Sample path of omega o T^i: the new value at l is the old value at l + i."""
        lo = tuple(a - b for a, b in zip(self.lo, as_index(i)))
        return Realization(self.innovation, self.seed, lo, self.atoms, self.axis_values)

def sample_box(innovation: InnovationModel, lo: LatticeIndex, hi: LatticeIndex, seed: int) -> Realization:
    """
    Sample the atoms of every site in the box lo <= l <= hi.

    iid: one variate per site. product: d one-dimensional sequences e_q
    combined as prod_q e_q(l_q).

    Raises:
        SupportOverflowError: If the box exceeds the configured support cap
    """
    lo, hi = as_index(lo), as_index(hi)
    shape = tuple(b - a + 1 for a, b in zip(lo, hi))
    if float(np.prod(np.asarray(shape, dtype=float))) > SETTINGS['limits']['support_cap']:
        raise SupportOverflowError(f"Sampling box {lo}..{hi} exceeds the support cap")

    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    if innovation.kind == InnovationKind.IID:
        grid = np.meshgrid(*axes, indexing='ij')
        atoms = innovation.laws[0].quantile(to_uniform(site_hash(seed, IID_TAG, grid)))
        return Realization(innovation, seed, lo, np.asarray(atoms, dtype=float))

    sequences = tuple(
        np.asarray(law.quantile(to_uniform(site_hash(seed, q + 1, [axis]))), dtype=float)
        for q, (law, axis) in enumerate(zip(innovation.laws, axes))
    )
    atoms = np.ones((), dtype=float)
    for sequence in sequences:
        atoms = np.multiply.outer(atoms, sequence)
    return Realization(innovation, seed, lo, atoms, sequences)

def sample_atoms(innovation: InnovationModel,
                 window: Window,
                 seed: int,
                 margin: Optional[Sequence[Tuple[int, int]]] = None) -> Realization:
    """
    Sample the atoms of a window enlarged by a per-axis margin.

    Args:
        innovation: Innovation model
        window: Window of lattice sites
        seed: Master seed of the realization
        margin: (below, above) extra sites per axis, zero by default

    Returns:
        Realization: Immutable atom values on the enlarged box
    """
    margin = margin or [(0, 0)] * window.d
    lo = tuple(o - below for o, (below, _) in zip(window.origin, margin))
    hi = tuple(t + above for t, (_, above) in zip(window.last_site, margin))
    return sample_box(innovation, lo, hi, seed)

def evaluate(c: AtomCombination, realization: Realization) -> float:
    """constant + sum_l coeff_l * atom_l on the realization."""
    if not c.terms:
        return c.constant
    keys = np.array(list(c.terms), dtype=np.int64)
    coefficients = np.fromiter(c.terms.values(), dtype=float, count=len(c))
    return float(c.constant + np.dot(coefficients, realization.values_at(keys)))

def evaluate_grid(c: AtomCombination,
                  realization: Realization,
                  base: LatticeIndex,
                  shape: LatticeIndex,
                  step: Optional[LatticeIndex] = None) -> np.ndarray:
    """
    Evaluate shift(c, base + step * p) for every grid point 0 <= p < shape.

    Raises:
        MarginError: If a shifted key leaves the sampled box
    """
    base, shape = as_index(base), as_index(shape)
    step = as_index(step) if step is not None else (1,) * len(shape)
    grid = np.full(shape, c.constant, dtype=float)
    if not c.terms:
        return grid
    lo, hi = c.bounding_box()
    reach = tuple(s * (n - 1) for s, n in zip(step, shape))
    realization._require(lattice_add(lo, base), lattice_add(lattice_add(hi, base), reach))
    for key, coefficient in c.terms.items():
        start = [k + b - l for k, b, l in zip(key, base, realization.lo)]
        index = tuple(
            slice(a, a + s * (n - 1) + 1, s) for a, s, n in zip(start, step, shape)
        )
        grid += coefficient * realization.atoms[index]
    return grid
