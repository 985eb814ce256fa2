import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneproj.constraints import (
    ConstraintMatrix,
    DataSet,
    build_equispaced,
    build_for,
    build_general,
    negate,
    validate_abscissae,
)
from coneproj.errors import DimensionMismatch, NotIncreasing, TooShort

from conftest import EX_X, random_abscissae


def test_validate_accepts_example():
    np.testing.assert_array_equal(validate_abscissae(EX_X), EX_X)


def test_validate_rejects_tie():
    with pytest.raises(NotIncreasing) as exc:
        validate_abscissae([0, 0, 1])
    assert exc.value.index == 2


def test_validate_rejects_later_decrease():
    with pytest.raises(NotIncreasing) as exc:
        validate_abscissae([0, 1, 2, 1.5, 3])
    assert exc.value.index == 4


def test_validate_too_short():
    with pytest.raises(TooShort) as exc:
        validate_abscissae([1, 2])
    assert exc.value.n == 2


def test_general_three_points():
    A = build_general([0, 1, 3])
    np.testing.assert_array_equal(A.to_dense(), [[2, -3, 1]])
    assert A.spacing_kind == "general"


def test_general_on_example_spacing():
    A = build_general(EX_X)
    for i in range(1, A.m + 1):
        np.testing.assert_array_equal(A.row(i)[i - 1 : i + 2], [0.5, -1, 0.5])


def test_equispaced_five():
    np.testing.assert_array_equal(
        build_equispaced(5).to_dense(),
        [[1, -2, 1, 0, 0], [0, 1, -2, 1, 0], [0, 0, 1, -2, 1]],
    )


def test_equispaced_three():
    np.testing.assert_array_equal(build_equispaced(3).to_dense(), [[1, -2, 1]])


def test_equispaced_too_short():
    with pytest.raises(TooShort):
        build_equispaced(2)


def test_equispaced_matches_general_on_unit_grid():
    assert build_equispaced(5) == build_general(np.arange(5.0))


def test_negate_example():
    R = negate(build_equispaced(5))
    np.testing.assert_array_equal(
        R.to_dense(),
        [[-1, 2, -1, 0, 0], [0, -1, 2, -1, 0], [0, 0, -1, 2, -1]],
    )
    np.testing.assert_array_equal(negate(build_general([0, 1, 3])).to_dense(), [[-2, 3, -1]])


def test_negate_involution():
    A = build_general([0, 0.3, 1, 2.5, 2.6])
    assert negate(negate(A)) == A
    assert -A == negate(A)


def test_banded_products_match_dense(rng):
    x = random_abscissae(rng, 9)
    A = build_general(x)
    y = rng.standard_normal(9)
    lam = rng.standard_normal(7)
    np.testing.assert_allclose(A.matvec(y), A.to_dense() @ y, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(A.rmatvec(lam), A.to_dense().T @ lam, rtol=1e-14, atol=1e-14)
    np.testing.assert_array_equal(A.rows([2, 5]), A.to_dense()[[1, 4]].T)


def test_from_dense_round_trip():
    A = build_general([0, 1, 3, 4])
    assert ConstraintMatrix.from_dense(A.to_dense()) == A
    bad = A.to_dense().copy()
    bad[0, 3] = 1.0
    with pytest.raises(ValueError):
        ConstraintMatrix.from_dense(bad)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        build_equispaced(5).matvec(np.zeros(4))
    with pytest.raises(DimensionMismatch):
        DataSet([0, 1, 2], [0, 1])


def test_build_for_detects_spacing():
    assert build_for(DataSet(EX_X, np.zeros(5))).spacing_kind == "equispaced"
    assert build_for(DataSet([0, 1, 3], np.zeros(3))).spacing_kind == "general"


abscissae = st.lists(
    st.floats(min_value=1e-3, max_value=10.0), min_size=2, max_size=20
).map(lambda gaps: np.concatenate([[0.0], np.cumsum(gaps)]))


@settings(max_examples=200, deadline=None)
@given(abscissae, st.floats(-100, 100), st.floats(-100, 100))
def test_affine_vectors_are_on_the_boundary(x, a, b):
    A = build_general(x)
    y = a + b * x
    tol = 1e-12 * np.max(np.abs(A.to_dense())) * max(1.0, np.max(np.abs(y)))
    assert np.max(np.abs(A.matvec(y))) <= tol * 8


@settings(max_examples=200, deadline=None)
@given(abscissae)
def test_squares_are_strictly_convex(x):
    assert np.all(build_general(x).matvec(x**2) > 0)


@settings(max_examples=200, deadline=None)
@given(abscissae)
def test_row_structure(x):
    A = build_general(x)
    dense = A.to_dense()
    for i in range(A.m):
        nz = np.flatnonzero(dense[i])
        np.testing.assert_array_equal(nz, [i, i + 1, i + 2])
    assert np.all(A.middle < 0) and np.all(A.left > 0) and np.all(A.right > 0)
    sums = A.left + A.middle + A.right
    assert np.all(np.abs(sums) <= 1e-14 * np.max(np.abs(dense), axis=1) * 4)


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 30), st.floats(-50, 50), st.floats(1e-3, 10))
def test_equispaced_is_scaled_general(n, start, step):
    x = start + step * np.arange(n)
    G = build_general(x)
    dx = np.diff(x)[:-1]  # per-row spacing
    E = build_equispaced(n)
    scaled = G.to_dense() / dx[:, None]
    np.testing.assert_allclose(scaled, E.to_dense(), rtol=1e-9, atol=1e-9)
