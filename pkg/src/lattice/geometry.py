"""
Integer-lattice geometry: indices, windows, slowly varying normalizers and
dyadic index sets.

Indices are plain tuples of ints. Axes are numbered from 0. Inside a window,
positions are 1-based (1 <= n_q <= sizes_q) so that n is also the extent of
the rectangle [1, n].
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Tuple, Union

import numpy as np

from src.core.error_handler import DomainError, WindowError

LatticeIndex = Tuple[int, ...]

ArrayLike = Union[float, Sequence[float], np.ndarray]

def as_index(coords: Sequence[int]) -> LatticeIndex:
    """Coerce a coordinate sequence into a LatticeIndex."""
    return tuple(int(c) for c in coords)

def zeros(d: int) -> LatticeIndex:
    return (0,) * d

def ones(d: int) -> LatticeIndex:
    return (1,) * d

def unit_vector(d: int, q: int) -> LatticeIndex:
    """e_q in dimension d."""
    return tuple(1 if axis == q else 0 for axis in range(d))

def precedes(i: LatticeIndex, j: LatticeIndex) -> bool:
    """Coordinatewise order i <= j."""
    return all(a <= b for a, b in zip(i, j))

def lattice_min(i: LatticeIndex, j: LatticeIndex) -> LatticeIndex:
    return tuple(min(a, b) for a, b in zip(i, j))

def lattice_add(i: LatticeIndex, j: LatticeIndex) -> LatticeIndex:
    return tuple(a + b for a, b in zip(i, j))

def lattice_sub(i: LatticeIndex, j: LatticeIndex) -> LatticeIndex:
    return tuple(a - b for a, b in zip(i, j))

def volume(n: LatticeIndex) -> int:
    """|n| = product of the coordinates."""
    return math.prod(n)

def powers_of_two(exponents: LatticeIndex) -> LatticeIndex:
    return tuple(2 ** k for k in exponents)

def is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0

@dataclass(frozen=True)
class Window:
    """
    Finite rectangle of lattice sites.

    Args:
        sizes: Per-axis extent N_q >= 1
        origin: Lattice site of window position (1, ..., 1)
    """
    sizes: LatticeIndex
    origin: LatticeIndex = field(default=None)

    def __post_init__(self):
        sizes = as_index(self.sizes)
        if not sizes:
            raise WindowError("Window needs at least one axis")
        if any(s < 1 for s in sizes):
            raise WindowError(f"Window sizes must be positive, got {sizes}")
        if math.prod(sizes) > np.iinfo(np.int64).max:
            raise WindowError(f"Window volume overflows machine integers: {sizes}")
        origin = zeros(len(sizes)) if self.origin is None else as_index(self.origin)
        if len(origin) != len(sizes):
            raise WindowError(f"Origin {origin} does not match dimension {len(sizes)}")
        object.__setattr__(self, 'sizes', sizes)
        object.__setattr__(self, 'origin', origin)

    @classmethod
    def dyadic(cls, exponents: Sequence[int], origin: Sequence[int] = None) -> 'Window':
        """Window with sizes 2^{exponents}."""
        if any(k < 0 for k in exponents):
            raise WindowError(f"Dyadic exponents must be nonnegative, got {tuple(exponents)}")
        return cls(powers_of_two(as_index(exponents)), origin)

    @property
    def d(self) -> int:
        return len(self.sizes)

    @property
    def volume(self) -> int:
        return volume(self.sizes)

    @property
    def last_site(self) -> LatticeIndex:
        """Lattice site of window position sizes."""
        return tuple(o + s - 1 for o, s in zip(self.origin, self.sizes))

    def contains(self, n: LatticeIndex) -> bool:
        """Whether 1-based position n lies in the window."""
        return len(n) == self.d and all(1 <= a <= s for a, s in zip(n, self.sizes))

    def site(self, n: LatticeIndex) -> LatticeIndex:
        """Lattice site of 1-based position n."""
        return tuple(o + a - 1 for o, a in zip(self.origin, n))

    def enlarged(self, sizes: Sequence[int]) -> 'Window':
        return Window(as_index(sizes), self.origin)

def log_plus(x: ArrayLike) -> Union[float, np.ndarray]:
    """
    L(x) = max(ln x, 1).

    Args:
        x: Positive real or array of positive reals

    Returns:
        float or ndarray matching the input shape

    Raises:
        DomainError: If any x <= 0
    """
    values = np.asarray(x, dtype=float)
    if np.any(~(values > 0)):
        raise DomainError(f"log_plus requires x > 0, got {x}")
    result = np.maximum(np.log(values), 1.0)
    return float(result) if result.ndim == 0 else result

def ll(x: ArrayLike) -> Union[float, np.ndarray]:
    """LL(x) = L(L(x))."""
    return log_plus(log_plus(x))

def axis_normalizers(size: int) -> np.ndarray:
    """(n ll(n))^{1/2} for n = 1..size."""
    n = np.arange(1, size + 1, dtype=float)
    return np.sqrt(n * ll(n))

def lil_normalizer(n: LatticeIndex) -> float:
    """
    |n|^{1/2} prod_q ll(n_q)^{1/2}.

    Raises:
        DomainError: If any n_q < 1
    """
    if any(a < 1 for a in n):
        raise DomainError(f"lil_normalizer requires n >= 1, got {tuple(n)}")
    return float(math.prod(math.sqrt(a * ll(a)) for a in n))

def lil_normalizer_grid(sizes: LatticeIndex) -> np.ndarray:
    """Normalizers of every 1 <= n <= sizes, as an array indexed by n - 1."""
    grid = np.ones((), dtype=float)
    for size in sizes:
        grid = np.multiply.outer(grid, axis_normalizers(size))
    return grid

def dyadic_values(size: int) -> Tuple[int, ...]:
    """Powers of two in [1, size]."""
    return tuple(2 ** k for k in range(size.bit_length()) if 2 ** k <= size)

def dyadic_mask(sizes: LatticeIndex, i: int) -> np.ndarray:
    """Boolean mask over positions 1..sizes of the index set N_i."""
    d = len(sizes)
    if not 0 <= i <= d:
        raise DomainError(f"Restriction must lie in [0, {d}], got {i}")
    mask = np.ones(sizes, dtype=bool)
    for q in range(i, d):
        axis = np.array([is_power_of_two(n) for n in range(1, sizes[q] + 1)])
        shape = [1] * d
        shape[q] = sizes[q]
        mask &= axis.reshape(shape)
    return mask

def dyadic_indices(window: Window, i: int) -> Iterator[LatticeIndex]:
    """
    Enumerate the positions of N_i inside the window.

    Coordinates on axes i, ..., d-1 are powers of two and the first i axes
    are free, so i = 0 yields the fully dyadic set and i = d every position.
    """
    if not 0 <= i <= window.d:
        raise DomainError(f"Restriction must lie in [0, {window.d}], got {i}")
    ranges = [
        range(1, size + 1) if q < i else dyadic_values(size)
        for q, size in enumerate(window.sizes)
    ]
    for n in itertools.product(*ranges):
        yield n
