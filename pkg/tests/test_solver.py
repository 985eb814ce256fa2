import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneproj.constraints import build_equispaced, build_general, negate
from coneproj.errors import DimensionMismatch, InvalidConfig
from coneproj.oracle import oracle_project
from coneproj.solver import (
    SolverConfig,
    Status,
    check_convex,
    kkt_diagnostics,
    select_max_violation,
    solve,
)

from conftest import EX_PHI, EX_RHO, EX_X, EX_Y, random_abscissae

A5 = build_equispaced(5)


def test_check_convex_example_is_not_convex():
    R = negate(A5)
    np.testing.assert_array_equal(R.matvec(EX_PHI), [-1.5, 0.75, 1.0])
    assert not check_convex(EX_PHI, R, 1e-9)


def test_check_convex_on_squares_and_lines(rng):
    x = random_abscissae(rng, 8)
    R = negate(build_general(x))
    assert check_convex(x**2, R, 1e-9)
    assert check_convex(2 - 3 * x, R, 1e-9)
    with pytest.raises(DimensionMismatch):
        check_convex(np.zeros(3), R, 1e-9)


@pytest.mark.parametrize(
    "b, expected",
    [
        ((-1.5, 0.75, 1.0), (1.0, 3)),
        ((-5 / 3, 17 / 12, 0.0), (17 / 12, 2)),
        ((1.0, 1.0, 0.0), (1.0, 1)),
    ],
)
def test_select_max_violation(b, expected):
    assert select_max_violation(np.array(b)) == expected


def test_example_solution():
    res = solve(EX_PHI, A5, SolverConfig(trace=True))
    assert res.status is Status.VIOLATION_CLEARED
    assert res.J == [2, 3]
    np.testing.assert_allclose(res.y, EX_Y, atol=1e-14)
    np.testing.assert_allclose(res.rho, EX_RHO, atol=1e-14)
    np.testing.assert_allclose(A5.matvec(res.y), [0.25, 0, 0], atol=1e-14)
    assert abs(res.y @ res.rho) <= 1e-12
    # picks 3 first, then 2
    assert [t.i for t in res.trace] == [3, 2]
    np.testing.assert_allclose(res.trace[1].b, [-5 / 3, 17 / 12, 0], atol=1e-14)


def test_example_general_matrix_gives_same_answer():
    res = solve(EX_PHI, build_general(EX_X))
    assert res.J == [2, 3]
    np.testing.assert_allclose(res.y, EX_Y, atol=1e-14)


def test_example_rebuild_mode_reproduces_mu():
    res = solve(EX_PHI, A5, SolverConfig(incremental=False))
    assert res.basis_indices == (2, 3)
    np.testing.assert_allclose(res.mu, [0.3061862179, 0.8215838362], atol=1e-10)
    np.testing.assert_allclose(res.y, EX_Y, atol=1e-14)


def test_already_convex(rng):
    x = random_abscissae(rng, 7)
    phi = x**2
    res = solve(phi, build_general(x))
    assert res.status is Status.ALREADY_CONVEX
    assert res.J == [] and res.iterations == 0
    assert np.array_equal(res.y, phi) and not np.any(res.rho)
    assert res.diagnostics["orthogonality"] == 0.0


def test_known_four_point_answer():
    # hand solution: face {1, 2} is the affine fit (0.4, 0.3, 0.2, 0.1)
    res = solve(np.array([0.0, 1.0, 0.0, 0.0]), build_equispaced(4))
    assert res.J == [1, 2]
    np.testing.assert_allclose(res.y, [0.4, 0.3, 0.2, 0.1], atol=1e-15)


def test_kkt_diagnostics_on_example():
    d = kkt_diagnostics(EX_Y, EX_RHO, A5, EX_PHI)
    assert d["min_feasibility"] == pytest.approx(0.0, abs=1e-14)
    assert d["orthogonality"] == pytest.approx(0.0, abs=1e-14)
    assert d["reconstruction"] <= 1e-15


def test_reconstruction_is_exact(rng):
    phi = rng.standard_normal(9)
    res = solve(phi, build_equispaced(9))
    assert kkt_diagnostics(res.y, res.rho, build_equispaced(9), phi)["reconstruction"] <= 1e-15 * np.max(np.abs(phi))


def test_invalid_configs():
    with pytest.raises(InvalidConfig):
        SolverConfig(eps1=0)
    with pytest.raises(InvalidConfig):
        SolverConfig(eps2=-1)
    with pytest.raises(InvalidConfig):
        SolverConfig(max_additions=0)
    with pytest.raises(InvalidConfig):
        solve(EX_PHI, A5, SolverConfig(max_additions=4))
    with pytest.raises(DimensionMismatch):
        solve(np.zeros(4), A5)


def test_addition_cap():
    res = solve(EX_PHI, A5, SolverConfig(max_additions=1))
    assert res.status is Status.ADDITION_CAP_REACHED
    assert res.J == [3]
    np.testing.assert_allclose(res.y, [0, 1 / 2, 8 / 3, 41 / 12, 25 / 6], atol=1e-15)


def test_stagnation_fires_with_huge_eps2():
    from coneproj.simulate import draw

    # needs three additions by default; the stagnation test cannot fire before the third
    phi = draw(2, 0, 8)
    A = build_equispaced(8)
    assert solve(phi, A).iterations >= 3
    res = solve(phi, A, SolverConfig(eps2=1e6))
    assert res.status is Status.STAGNATED
    assert len(res.J) == 2


def test_violation_beats_other_exits():
    # converged run with eps2 large: the cleared violation takes precedence
    res = solve(np.array([0.0, 1.0, 0.0]), build_equispaced(3), SolverConfig(eps2=1e6))
    assert res.status is Status.VIOLATION_CLEARED


def test_absolute_tolerance_mode():
    cfg = SolverConfig(scale_tolerances=False)
    res = solve(1e6 * EX_PHI, A5, cfg)
    assert res.scale == 1.0
    np.testing.assert_allclose(res.y, 1e6 * EX_Y, rtol=1e-12)


def test_scale_equivariance(rng):
    phi = rng.standard_normal(8)
    A = build_equispaced(8)
    a, b = solve(phi, A), solve(1e5 * phi, A)
    assert a.J == b.J
    np.testing.assert_allclose(b.y, 1e5 * a.y, rtol=1e-9, atol=1e-9)


def test_rebuild_and_incremental_agree(rng):
    A = build_equispaced(10)
    for _ in range(50):
        phi = rng.standard_normal(10)
        a = solve(phi, A)
        b = solve(phi, A, SolverConfig(incremental=False))
        assert a.J == b.J
        assert np.max(np.abs(a.y - b.y)) <= 1e-10


def test_counterexample_beyond_small_n():
    # indices are never removed, so the exit point is not always the
    # projection; draw(1, 147, 10) keeps constraint 1 although its
    # multiplier at the true projection would be negative
    from coneproj.simulate import draw

    A = build_equispaced(10)
    phi = draw(1, 147, 10)
    res = solve(phi, A)
    y_o, cert = oracle_project(phi, A)
    assert res.status is Status.VIOLATION_CLEARED
    assert res.J == [1, 3, 4, 5, 6, 7, 8]
    assert cert.J_star == [3, 4, 5, 6, 7, 8]
    assert np.min(A.matvec(res.y)) >= -1e-8 * res.scale
    assert np.linalg.norm(res.y - phi) > np.linalg.norm(y_o - phi)


gaussian = st.integers(3, 12).flatmap(
    lambda n: st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s).standard_normal(n))
)


@settings(max_examples=300, deadline=None)
@given(gaussian)
def test_solver_invariants(phi):
    n = phi.size
    A = build_equispaced(n)
    res = solve(phi, A, SolverConfig(trace=True))
    assert np.array_equal(res.y, phi - res.rho)
    assert res.J == sorted(set(res.J))
    if res.status is Status.ALREADY_CONVEX:
        return
    assert res.status is Status.VIOLATION_CLEARED
    scale = res.scale
    assert np.min(A.matvec(res.y)) >= -1e-9 * scale
    assert abs(res.y @ res.rho) <= 1e-9 * scale * np.linalg.norm(phi)
    sizes = [len(t.J) for t in res.trace]
    assert sizes == list(range(1, len(sizes) + 1))
    for t in res.trace:
        assert t.J == sorted(t.J)
    norms = [t.rho_norm for t in res.trace]
    assert all(b >= a - 1e-12 for a, b in zip(norms, norms[1:]))
    assert solve(res.y, A).status is Status.ALREADY_CONVEX
