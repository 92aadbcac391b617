"""Exact integer linear algebra helpers."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divmax import _exact

matrices = st.lists(
    st.lists(st.integers(min_value=-5, max_value=5), min_size=3, max_size=6),
    min_size=1,
    max_size=5,
).filter(lambda rows: len({len(r) for r in rows}) == 1)


@given(matrices)
@settings(max_examples=200, deadline=None)
def test_rank_matches_numpy(rows):
    expected = np.linalg.matrix_rank(np.array(rows, dtype=float))
    assert _exact.rank(rows) == expected


@given(matrices)
@settings(max_examples=200, deadline=None)
def test_kernel_basis_is_exact_and_full(rows):
    basis = _exact.integer_kernel_basis(rows)
    n = len(rows[0])
    assert len(basis) == n - _exact.rank(rows)
    for vec in basis:
        assert all(isinstance(v, int) for v in vec)
        for row in rows:
            assert sum(a * v for a, v in zip(row, vec)) == 0
    if basis:
        assert _exact.rank(list(basis)) == len(basis)


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_rref_preserves_row_space(rows):
    red, pivots = _exact.rref(rows)
    red = [r for r in red if any(r)]
    assert len(red) == len(pivots) == _exact.rank(rows)
    for r in red:
        assert _exact.in_row_span(rows, r)
    for r in rows:
        if any(r):
            assert _exact.in_row_span(red, r) or not red


def test_scaled_integers_known():
    vec = [Fraction(-1, 3), Fraction(1, 5), 0, 1]
    assert _exact.scaled_integers(vec) == (-5, 3, 0, 15)
    assert _exact.scaled_integers([Fraction(2, 4), Fraction(-1, 4)]) == (2, -1)
    assert _exact.scaled_integers([4, -6, 2]) == (2, -3, 1)
    # dyadic floats are exact rationals too
    assert _exact.scaled_integers([0.5, -0.25]) == (2, -1)


@given(st.lists(st.fractions(max_denominator=20), min_size=1, max_size=6))
@settings(max_examples=200, deadline=None)
def test_scaled_integers_proportional(vec):
    ints = _exact.scaled_integers(vec)
    nz = [(v, i) for v, i in zip(vec, ints) if v != 0]
    assert all(i == 0 for v, i in zip(vec, ints) if v == 0)
    if nz:
        ratio = Fraction(nz[0][1]) / Fraction(nz[0][0])
        assert ratio > 0
        for v, i in nz:
            assert Fraction(i) == ratio * Fraction(v)


def test_solve_linear():
    x = _exact.solve_linear([[2, 0], [0, 3]], [4, 9])
    assert x == [Fraction(2), Fraction(3)]
    assert _exact.solve_linear([[1, 1], [1, 1]], [1, 2]) is None


def test_lp_solve_known():
    # max x+y on the triangle x+y <= 1 (slack variable makes it an equality)
    value, x = _exact.lp_solve([[1, 1, 1]], [1], [1, 1, 0])
    assert value == 1
    assert sum(x) == 1
    assert _exact.lp_solve([[1, 1]], [-1], [0, 0]) is None


def test_lp_feasible():
    assert _exact.lp_feasible([[1, 1]], [1]) is not None
    assert _exact.lp_feasible([[1, 1]], [-2]) is None
    # x - y = 0 with x + y = 2 forces x = y = 1
    sol = _exact.lp_feasible([[1, -1], [1, 1]], [0, 2])
    assert sol == [Fraction(1), Fraction(1)]


def test_in_row_span():
    rows = [[1, 1, 1], [1, 0, 0]]
    assert _exact.in_row_span(rows, [0, 1, 1])
    assert not _exact.in_row_span(rows, [0, 1, 0])
