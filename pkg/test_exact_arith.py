from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import assume, given, settings

from services.errors import DimensionMismatchError
from services.exact_arith import (
    RatMatrix,
    determinant,
    dot,
    format_rational,
    inverse,
    parse_rational,
    rational,
    solve_linear_system,
    solve_unique,
)


def test_fraction_arithmetic_is_canonical():
    assert rational(1, 2) + rational(1, 3) == Fraction(5, 6)
    assert rational(2, 4) == Fraction(1, 2)
    half = rational(-1, -2)
    assert half == Fraction(1, 2) and half.denominator == 2


def test_division_by_zero_rational():
    with pytest.raises(ZeroDivisionError):
        rational(1, 0)


@pytest.mark.parametrize("text, value", [("3", Fraction(3)), ("-7/21", Fraction(-1, 3)), (5, Fraction(5))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_format_rational_omits_unit_denominator():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_dot_rejects_mismatched_lengths():
    with pytest.raises(DimensionMismatchError):
        dot((1, 2), (1, 2, 3))


def test_solve_identity():
    assert solve_linear_system(RatMatrix.identity(3), [1, 2, 3]) == (1, 2, 3)


def test_solve_diagonal():
    assert solve_linear_system(RatMatrix.of([[2, 0], [0, 2]]), [2, 4]) == (1, 2)


def test_solve_singular_is_none():
    assert solve_linear_system(RatMatrix.of([[1, 1], [2, 2]]), [1, 1]) is None


def test_solve_requires_square():
    with pytest.raises(DimensionMismatchError):
        solve_linear_system(RatMatrix.of([[1, 0, 0], [0, 1, 0]]), [1, 1])


def test_solve_unique_underdetermined():
    assert solve_unique([[1, 1]], [2]) is None


@pytest.mark.parametrize("rows, det", [
    ([[1 if i == j else 0 for j in range(4)] for i in range(4)], 1),
    ([[1, 2], [3, 4]], -2),
    ([[1, 1], [2, 2]], 0),
    ([[Fraction(1, 2), 0], [0, Fraction(2, 3)]], Fraction(1, 3)),
])
def test_determinant(rows, det):
    assert determinant(RatMatrix.of(rows)) == det


def test_inverse_of_singular_is_none():
    assert inverse(RatMatrix.of([[1, 2], [2, 4]])) is None


square = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=60, deadline=None)
@given(square, st.data())
def test_solution_satisfies_system(rows, data):
    A = RatMatrix.of(rows)
    assume(determinant(A) != 0)
    b = data.draw(st.lists(st.integers(-9, 9), min_size=A.nrows, max_size=A.nrows))
    x = solve_linear_system(A, b)
    assert A.apply(x) == tuple(Fraction(v) for v in b)


@settings(max_examples=60, deadline=None)
@given(square)
def test_determinant_of_inverse(rows):
    A = RatMatrix.of(rows)
    det = determinant(A)
    assume(det != 0)
    assert det * determinant(inverse(A)) == 1


@given(st.fractions(), st.fractions())
def test_order_is_total(x, y):
    assert sum([x < y, x == y, x > y]) == 1
