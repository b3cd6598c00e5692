import math

import numpy as np
import pytest

from src.core.error_handler import DomainError, WindowError
from src.lattice.geometry import (
    Window,
    dyadic_indices,
    dyadic_mask,
    lattice_min,
    lil_normalizer,
    lil_normalizer_grid,
    ll,
    log_plus,
    precedes,
    unit_vector
)

class TestNormalizers:
    def test_log_plus_floor(self):
        assert log_plus(1.0) == 1.0
        assert log_plus(0.5) == 1.0
        assert log_plus(math.e ** 2) == pytest.approx(2.0)

    def test_log_plus_vectorized(self):
        np.testing.assert_allclose(log_plus([1.0, math.e ** 3]), [1.0, 3.0])

    @pytest.mark.parametrize('x', [0.0, -1.0])
    def test_log_plus_rejects_nonpositive(self, x):
        with pytest.raises(DomainError):
            log_plus(x)

    def test_ll_is_one_below_e_to_the_e(self):
        assert ll(1.0) == 1.0
        assert ll(15.0) == 1.0
        assert ll(1e6) == pytest.approx(math.log(math.log(1e6)))

    def test_lil_normalizer_unit(self):
        assert lil_normalizer((1, 1)) == 1.0
        assert lil_normalizer((8,)) == pytest.approx(math.sqrt(8.0))

    def test_lil_normalizer_rejects_zero(self):
        with pytest.raises(DomainError):
            lil_normalizer((0, 3))

    def test_grid_matches_pointwise(self):
        grid = lil_normalizer_grid((5, 3))
        for n in np.ndindex(5, 3):
            assert grid[n] == pytest.approx(lil_normalizer(tuple(a + 1 for a in n)))

class TestWindow:
    def test_dyadic_sizes(self):
        window = Window.dyadic((2, 3))
        assert window.sizes == (4, 8)
        assert window.origin == (0, 0)
        assert window.volume == 32

    def test_sites_follow_origin(self):
        window = Window((3, 3), origin=(-1, 2))
        assert window.site((1, 1)) == (-1, 2)
        assert window.last_site == (1, 4)
        assert window.contains((3, 1))
        assert not window.contains((0, 1))

    @pytest.mark.parametrize('sizes', [(0,), (3, -1), ()])
    def test_invalid_sizes(self, sizes):
        with pytest.raises(WindowError):
            Window(sizes)

    def test_negative_dyadic_exponent(self):
        with pytest.raises(WindowError):
            Window.dyadic((-1,))

class TestOrder:
    def test_coordinatewise_order(self):
        assert precedes((0, -1), (0, 0))
        assert not precedes((1, -1), (0, 0))
        assert lattice_min((3, -2), (1, 5)) == (1, -2)
        assert unit_vector(3, 1) == (0, 1, 0)

class TestDyadicIndices:
    @pytest.mark.parametrize('i,count', [(0, 9), (1, 12), (2, 16)])
    def test_counts(self, i, count):
        assert len(list(dyadic_indices(Window((4, 4)), i))) == count

    def test_fully_dyadic_set(self):
        assert set(dyadic_indices(Window((4,)), 0)) == {(1,), (2,), (4,)}

    @pytest.mark.parametrize('i', [0, 1, 2])
    def test_mask_matches_enumeration(self, i):
        window = Window((6, 5))
        mask = dyadic_mask(window.sizes, i)
        listed = {tuple(int(a) + 1 for a in row) for row in np.argwhere(mask)}
        assert listed == set(dyadic_indices(window, i))

    def test_restriction_out_of_range(self):
        with pytest.raises(DomainError):
            list(dyadic_indices(Window((4, 4)), 3))
