import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from l0lab import InvalidInputError, l1_regression, least_squares, numerical_rank, spectral_norm
from l0lab.datasets import noisy_recovery_instance
from l0lab.linalg import l1_optimal_vertices

from oracles import l1_vertex_scan, minor_rank

small_ints = st.integers(-5, 5).map(float)


def int_matrix(m, n):
    return arrays(float, (m, n), elements=small_ints)


def test_least_squares_identity():
    res = least_squares(np.eye(2), [3.0, -4.0])
    np.testing.assert_allclose(res.minimizer, [3.0, -4.0])
    assert res.residual_norm == pytest.approx(0.0, abs=1e-14)
    assert res.rank_used == 2


def test_least_squares_true_support_of_bundled_instance():
    inst = noisy_recovery_instance()
    res = least_squares(inst.A[:, [1, 2]], inst.b)
    assert res.residual_norm == pytest.approx(3.3363, abs=1e-4)


def test_least_squares_normal_equations():
    rng = np.random.default_rng(1)
    for _ in range(20):
        M = rng.normal(size=(4, 2))
        v = rng.normal(size=4)
        res = least_squares(M, v)
        np.testing.assert_allclose(M.T @ M @ res.minimizer, M.T @ v, atol=1e-9)
        # no nearby point does better
        grid = np.linspace(-0.01, 0.01, 21)
        for d1 in grid:
            for d2 in grid:
                y = res.minimizer + [d1, d2]
                assert np.linalg.norm(M @ y - v) >= res.residual_norm - 1e-12


def test_least_squares_rank_deficient_is_minimum_norm():
    M = np.array([[1.0, 1.0], [2.0, 2.0], [0.0, 0.0]])
    v = np.array([1.0, 2.0, 3.0])
    res = least_squares(M, v)
    assert res.rank_used == 1
    np.testing.assert_allclose(res.minimizer, np.linalg.pinv(M) @ v, atol=1e-12)


@given(st.integers(1, 5), st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_least_squares_residual_orthogonal(m, d, data):
    M = data.draw(int_matrix(m, d))
    v = data.draw(arrays(float, m, elements=small_ints))
    res = least_squares(M, v)
    scale = max(1.0, np.abs(M).max() * np.abs(v).max())
    np.testing.assert_allclose(M.T @ (M @ res.minimizer - v), 0.0, atol=1e-9 * scale)
    assert res.residual_norm >= 0


def test_least_squares_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        least_squares(np.eye(3), [1.0, 2.0])


def test_l1_median():
    res = l1_regression(np.ones((3, 1)), [0.0, 1.0, 10.0])
    np.testing.assert_allclose(res.minimizer, [1.0])
    assert res.residual_l1 == pytest.approx(10.0)


def test_l1_fits_fittable_rows():
    M = np.vstack([np.eye(2), np.zeros((1, 2))])
    res = l1_regression(M, [2.0, 5.0, 7.0])
    np.testing.assert_allclose(res.minimizer, [2.0, 5.0])
    assert res.residual_l1 == pytest.approx(7.0)


def test_l1_matches_vertex_scan():
    rng = np.random.default_rng(2)
    for _ in range(30):
        M = rng.normal(size=(5, 2))
        v = rng.normal(size=5)
        res = l1_regression(M, v)
        assert res.residual_l1 == pytest.approx(l1_vertex_scan(M, v), abs=1e-10)


def test_l1_lexicographic_tie_break():
    # every y in [0, 1] is optimal; the basic solutions are y = 0 and y = 1
    M = np.ones((2, 1))
    res = l1_regression(M, [0.0, 1.0])
    # row subsets {0} and {1} tie; the first one wins
    assert res.zeroed_rows == (0,)
    np.testing.assert_allclose(res.minimizer, [0.0])


@given(st.integers(1, 5), st.integers(1, 3), st.data())
@settings(max_examples=60, deadline=None)
def test_l1_vertex_has_enough_zero_residuals(m, d, data):
    M = data.draw(int_matrix(m, d))
    v = data.draw(arrays(float, m, elements=small_ints))
    res = l1_regression(M, v)
    assert res.residual_l1 >= 0
    r = M @ res.minimizer - v
    assert np.abs(r).sum() == pytest.approx(res.residual_l1, abs=1e-9)
    if numerical_rank(M) == d:
        assert len(res.zeroed_rows) >= d
        assert np.all(np.abs(r[list(res.zeroed_rows)]) <= 1e-9 * max(1.0, np.abs(v).max()))


def test_l1_optimality_against_perturbations():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(6, 3))
    v = rng.normal(size=6)
    res = l1_regression(M, v)
    for _ in range(1000):
        y = res.minimizer + rng.normal(scale=0.1, size=3)
        assert res.residual_l1 <= np.abs(M @ y - v).sum() + 1e-12


def test_l1_rank_deficient_pads_zeros():
    M = np.array([[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
    res = l1_regression(M, [0.0, 1.0, 10.0])
    np.testing.assert_allclose(res.minimizer, [1.0, 0.0])


def test_l1_optimal_vertices_all_optimal():
    M = np.ones((2, 1))
    verts = l1_optimal_vertices(M, np.array([0.0, 1.0]))
    assert sorted(float(v[0]) for v in verts) == [0.0, 1.0]


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(noisy_recovery_instance().A) == 4
    assert numerical_rank(np.zeros((2, 3))) == 0
    M = np.array([[1.0, 2.0, 1.0], [3.0, 4.0, 3.0], [5.0, 0.0, 5.0]])
    assert numerical_rank(M) == minor_rank(M) == 2


@given(st.integers(1, 4), st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_numerical_rank_matches_minors_and_permutations(m, n, data):
    M = data.draw(int_matrix(m, n))
    r = numerical_rank(M)
    assert r == minor_rank(M)
    perm = data.draw(st.permutations(range(n)))
    assert numerical_rank(M[:, list(perm)]) == r


def test_spectral_norm_examples():
    assert spectral_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, rel=1e-12)
    assert spectral_norm(np.zeros((2, 2))) == 0.0
    # all-ones start is orthogonal to the top singular vector here
    M = np.array([[1.0, -1.0], [0.0, 0.0]])
    assert spectral_norm(M) == pytest.approx(np.sqrt(2.0), rel=1e-10)


def test_spectral_norm_bounds_rayleigh_quotients():
    rng = np.random.default_rng(4)
    M = rng.normal(size=(4, 5))
    tol = 1e-10
    v = spectral_norm(M, tol=tol)
    assert v == pytest.approx(np.linalg.norm(M, 2), rel=1e-8)
    for _ in range(100):
        u = rng.normal(size=5)
        u /= np.linalg.norm(u)
        assert np.linalg.norm(M.T @ (M @ u)) <= v**2 * (1 + tol)


def test_spectral_norm_convergence_flag():
    value, ok = spectral_norm(np.diag([2.0, 1.0]), full_output=True)
    assert ok and value == pytest.approx(2.0)
