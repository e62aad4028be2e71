"""Exact rational linear algebra: oracle and property tests."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilflow import linalg_exact as lx

small_int = st.integers(-6, 6)


def int_matrix(n, m):
    return st.lists(
        st.lists(small_int, min_size=m, max_size=m), min_size=n, max_size=n
    )


def test_rref_known():
    r, piv = lx.rref([[1, 2], [2, 4]])
    assert piv == [0]
    assert r[0] == [Fraction(1), Fraction(2)]
    assert all(x == 0 for x in r[1])


def test_rank_identity():
    assert lx.rank(lx.identity(4)) == 4
    assert lx.rank(lx.zeros(3, 5)) == 0


@given(int_matrix(3, 4))
def test_nullspace_annihilates(mat):
    for v in lx.nullspace(mat):
        assert all(
            sum(row[i] * v[i] for i in range(4)) == 0 for row in mat
        )


@given(int_matrix(3, 4))
def test_rank_nullity(mat):
    assert lx.rank(mat) + len(lx.nullspace(mat)) == 4


@given(int_matrix(3, 3), st.lists(small_int, min_size=3, max_size=3))
def test_solve_consistent(mat, x):
    b = [sum(row[i] * x[i] for i in range(3)) for row in mat]
    sol = lx.solve(mat, b)
    assert sol is not None
    got = [sum(row[i] * sol[i] for i in range(3)) for row in mat]
    assert got == [Fraction(v) for v in b]


@given(int_matrix(3, 3))
def test_inverse_or_singular(mat):
    if lx.det(mat) == 0:
        with pytest.raises(ValueError):
            lx.inverse(mat)
    else:
        assert lx.mat_mul(mat, lx.inverse(mat)) == lx.identity(3)


@given(int_matrix(3, 3))
def test_det_vs_numpy_sign_and_charpoly(mat):
    # det = (-1)^n * constant coefficient of the characteristic polynomial
    coeffs = lx.char_poly(mat)
    assert lx.det(mat) == (-1) ** 3 * coeffs[-1]


def test_char_poly_diagonal():
    # (l-1)(l-2)(l-3) = l^3 - 6l^2 + 11l - 6
    mat = [[1, 0, 0], [0, 2, 0], [0, 0, 3]]
    assert lx.char_poly(mat) == [1, -6, 11, -6]


@given(int_matrix(3, 5))
@settings(max_examples=50)
def test_integer_kernel_annihilates_and_saturates(mat):
    ker = lx.integer_kernel(mat)
    for v in ker:
        assert all(isinstance(x, int) for x in v)
        assert all(
            sum(row[i] * v[i] for i in range(5)) == 0 for row in mat
        )
    assert len(ker) == len(lx.nullspace(mat))
    if ker:
        assert lx.rank(ker) == len(ker)


def test_clear_denominators():
    ints, den = lx.clear_denominators([[Fraction(1, 2), Fraction(1, 3)]])
    assert den == 6
    assert ints == [[3, 2]]


def test_mat_vec_transpose():
    a = [[1, 2], [3, 4]]
    assert lx.mat_vec(a, [1, 1]) == [3, 7]
    assert lx.transpose(a) == [[1, 3], [2, 4]]
