import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.error_handler import DomainError, ShapeMismatchError, WindowError
from src.lattice.geometry import Window
from src.lattice.prefix_table import (
    build_prefix_table,
    directional_sum,
    directional_sum_grid,
    inclusive_scan,
    rect_sum
)

@st.composite
def fields_with_rectangle(draw):
    d = draw(st.integers(1, 3))
    limit = 16 if d < 3 else 6
    sizes = tuple(draw(st.integers(1, limit)) for _ in range(d))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    values = np.random.default_rng(seed).integers(-50, 51, size=sizes)
    lo, hi = [], []
    for s in sizes:
        a = draw(st.integers(1, s))
        b = draw(st.integers(a, s))
        lo.append(a)
        hi.append(b)
    return values, tuple(lo), tuple(hi)

def brute_force(values, lo, hi):
    return values[tuple(slice(a - 1, b) for a, b in zip(lo, hi))].sum()

class TestPrefixTable:
    @settings(max_examples=100, deadline=None)
    @given(fields_with_rectangle())
    def test_integer_mode_exact(self, case):
        values, lo, hi = case
        table = build_prefix_table(values)
        assert table.exact
        assert rect_sum(table, lo, hi) == int(brute_force(values, lo, hi))

    @settings(max_examples=100, deadline=None)
    @given(fields_with_rectangle())
    def test_float_mode(self, case):
        values, lo, hi = case
        values = values * 0.37
        table = build_prefix_table(values)
        expected = float(brute_force(values, lo, hi))
        assert rect_sum(table, lo, hi) == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_zero_boundary(self):
        table = build_prefix_table(np.arange(12).reshape(3, 4))
        assert not table.cumulative[0, :].any()
        assert not table.cumulative[:, 0].any()
        assert table.total == 66

    def test_nondecreasing_for_nonnegative_values(self):
        values = np.random.default_rng(1).integers(0, 5, size=(5, 6))
        cumulative = build_prefix_table(values).cumulative
        assert np.all(np.diff(cumulative, axis=0) >= 0)
        assert np.all(np.diff(cumulative, axis=1) >= 0)

    def test_scan_matches_cumsum(self):
        values = np.random.default_rng(2).integers(-9, 10, size=(37, 5))
        np.testing.assert_array_equal(inclusive_scan(values, 0), np.cumsum(values, axis=0))

    def test_float_drift_on_long_axis(self):
        values = np.full(2 ** 16, 0.1)
        table = build_prefix_table(values)
        assert table.total == pytest.approx(6553.6, rel=1e-12)

    def test_integer_mode_near_int64_limit(self):
        table = build_prefix_table(np.full((2, 2), 2 ** 60, dtype=np.int64))
        assert table.cumulative.dtype == np.int64
        assert rect_sum(table, (1, 1), (2, 2)) == 2 ** 62
        assert rect_sum(table, (2, 2), (2, 2)) == 2 ** 60

    @pytest.mark.parametrize('values', [
        np.full(4, 2 ** 62, dtype=np.int64),
        np.array([-(2 ** 63), 0], dtype=np.int64),
        np.array([2 ** 63], dtype=np.uint64),
    ])
    def test_integer_overflow_is_refused(self, values):
        with pytest.raises(DomainError, match='overflow int64'):
            build_prefix_table(values)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            build_prefix_table(np.zeros((2, 3)), Window((3, 2)))

    @pytest.mark.parametrize('lo,hi', [((0, 1), (2, 2)), ((1, 1), (4, 2)), ((2, 2), (1, 2))])
    def test_rect_outside_window(self, lo, hi):
        table = build_prefix_table(np.ones((3, 3)))
        with pytest.raises(WindowError):
            rect_sum(table, lo, hi)

class TestDirectionalSum:
    values = np.random.default_rng(3).integers(-5, 6, size=(4, 5, 3))

    def test_all_axes_is_rectangle(self):
        table = build_prefix_table(self.values)
        assert directional_sum(table, (2, 3, 1), {0, 1, 2}) == rect_sum(table, (1, 1, 1), (2, 3, 1))

    def test_no_axes_is_single_value(self):
        table = build_prefix_table(self.values)
        assert directional_sum(table, (2, 3, 1), set()) == self.values[2, 3, 1]

    def test_mixed_axes(self):
        table = build_prefix_table(self.values)
        assert directional_sum(table, (3, 0, 2), {0}) == self.values[0:3, 0, 2].sum()

    @pytest.mark.parametrize('axes', [set(), {0}, {1}, {0, 2}, {0, 1, 2}])
    def test_grid_matches_pointwise(self, axes):
        table = build_prefix_table(self.values)
        grid = directional_sum_grid(table, axes)
        assert grid.shape == self.values.shape
        for position in itertools.product(*(range(s) for s in self.values.shape)):
            i = tuple(a + 1 if q in axes else a for q, a in enumerate(position))
            assert grid[position] == directional_sum(table, i, axes)

    def test_offsets_outside_window(self):
        table = build_prefix_table(self.values)
        with pytest.raises(WindowError):
            directional_sum(table, (0, 0, 0), {0})
        with pytest.raises(WindowError):
            directional_sum(table, (4, 0, 0), set())
