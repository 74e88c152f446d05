from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lllkit.derandomize import build_space
from lllkit.errors import CapExceeded, UnsupportedDistribution
from lllkit.events import BadEvent, EventSystem, VariableDomain
from lllkit.instances import tiny_a
from lllkit.table import ResamplingTable, default_column_cap, from_point, initial_assignment


def test_degenerate_variable():
    dom = VariableDomain(((5, Fraction(1)),))
    sys = EventSystem([dom, VariableDomain.uniform(2)], [BadEvent.atomic(1, [(1, 0)])])
    R = ResamplingTable(sys, 3)
    assert all(R.cell(0, t) == 5 for t in range(1, 50))


def test_rereads_identical_and_order_free():
    sys = tiny_a()
    a = ResamplingTable(sys, 99)
    b = ResamplingTable(sys, 99)
    cells = [(i, t) for i in range(2) for t in range(1, 40)]
    first = {c: a.cell(*c) for c in cells}
    second = {c: b.cell(*c) for c in reversed(cells)}
    assert first == second
    assert all(a.cell(*c) == first[c] for c in cells)


def test_seeds_differ():
    sys = tiny_a()
    cols = [[ResamplingTable(sys, s).cell(0, t) for t in range(1, 65)] for s in (1, 2)]
    assert cols[0] != cols[1]


def test_initial_assignment():
    sys = tiny_a()
    R = ResamplingTable.from_columns(sys, [[0], [1]])
    assert initial_assignment(R) == (0, 1)
    assert R.initial_assignment() == R.initial_assignment()


def test_column_cap_and_bounds():
    sys = tiny_a()
    R = ResamplingTable(sys, 0, max_column=4)
    R.cell(0, 4)
    with pytest.raises(CapExceeded):
        R.cell(0, 5)
    with pytest.raises(IndexError):
        R.cell(2, 1)
    with pytest.raises(IndexError):
        R.cell(0, 0)
    assert default_column_cap(2, Fraction(1, 4)) == 64 * 8


def test_dump_load_round_trip():
    sys = tiny_a()
    R = ResamplingTable(sys, 17)
    vals = [R.cell(i, t) for i in range(2) for t in range(1, 9)]
    S = ResamplingTable.loads(sys, R.dumps())
    assert S.seed == 17
    assert [S.cell(i, t) for i in range(2) for t in range(1, 9)] == vals


def test_uniform_frequency():
    sys = tiny_a()
    R = ResamplingTable(sys, 4)
    N = 100_000
    ones = sum(R.cell(0, t) for t in range(1, N + 1))
    se = (0.25 / N) ** 0.5
    assert abs(ones / N - 0.5) <= 4 * se


def test_chi_square_nonuniform():
    dom = VariableDomain(((0, Fraction(1, 6)), (1, Fraction(1, 3)), (2, Fraction(1, 2))))
    sys = EventSystem([dom], [BadEvent.atomic(1, [(0, 0)])])
    R = ResamplingTable(sys, 11)
    N = 100_000
    counts = np.bincount([R.cell(0, t) for t in range(1, N + 1)], minlength=3)
    expected = np.array([1 / 6, 1 / 3, 1 / 2]) * N
    assert stats.chisquare(counts, expected).pvalue > 1e-4


def test_space_table_zero_point():
    sys = tiny_a()
    space = build_space(8, 2, 8)
    T = from_point(space, (0, 0), sys, 4)
    assert all(T.cell(i, t) == 0 for i in range(2) for t in range(1, 5))
    with pytest.raises(CapExceeded):
        T.cell(0, 5)


def test_space_table_points_differ_and_repeat():
    sys = tiny_a()
    space = build_space(8, 2, 8)
    a = from_point(space, (1, 3), sys, 4)
    b = from_point(space, (1, 2), sys, 4)
    va = [a.cell(i, t) for i in range(2) for t in range(1, 5)]
    vb = [b.cell(i, t) for i in range(2) for t in range(1, 5)]
    assert va != vb
    assert va == [a.cell(i, t) for i in range(2) for t in range(1, 5)]


def test_space_table_needs_qadic():
    sys = tiny_a()
    with pytest.raises(UnsupportedDistribution):
        from_point(build_space(7, 2, 7), (0, 0), sys, 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 1), st.integers(1, 10**6))
def test_cell_pure(seed, i, t):
    sys = tiny_a()
    assert ResamplingTable(sys, seed).cell(i, t) == ResamplingTable(sys, seed).cell(i, t)
