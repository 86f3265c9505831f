import io

import numpy as np
import pytest

from l0lab import (
    Instance,
    InvalidInputError,
    SmoothPenaltyProblem,
    SquaredHinge,
    breakpoints,
    levels,
    lipschitz_bound,
    optimal_set_penalty,
    phi_big_eval,
    phi_big_grad,
    prox_grad_solve,
    residual_staircase,
)
from l0lab.datasets import noisy_recovery_truth
from l0lab.smooth import hard_threshold, hinge_shrink, objective, write_trace_csv


@pytest.fixture
def prob(bundled):
    return SmoothPenaltyProblem(bundled, 3.6, 1.0)


def fd_grad(prob, x, h=1e-6):
    return np.array([(phi_big_eval(prob, x + h * e) - phi_big_eval(prob, x - h * e)) / (2 * h) for e in np.eye(len(x))])


def test_truth_is_inside_the_hinge(bundled, prob):
    x_true, sigma = noisy_recovery_truth()
    assert sigma == 3.6
    assert bundled.residual(np.array(x_true, dtype=float)) == pytest.approx(3.5734, abs=1e-4)
    assert phi_big_eval(prob, x_true) == 0.0
    assert not phi_big_grad(prob, x_true).any()


def test_sigma_zero_reduces_to_least_squares(bundled):
    p0 = SmoothPenaltyProblem(bundled, 0.0, 1.0)
    x = np.arange(5.0)
    r = bundled.A @ x - bundled.b
    assert phi_big_eval(p0, x) == pytest.approx(0.5 * r @ r)
    np.testing.assert_allclose(phi_big_grad(p0, x), bundled.A.T @ r)


def test_gradient_matches_finite_differences(bundled, prob):
    rng = np.random.default_rng(14)
    done = 0
    while done < 100:
        x = rng.normal(scale=5, size=5)
        if bundled.residual(x) <= 3.7:
            continue
        g = phi_big_grad(prob, x)
        assert np.linalg.norm(g - fd_grad(prob, x)) <= 1e-6 * np.linalg.norm(g)
        done += 1


def test_gradient_vanishes_at_the_hinge(bundled, prob):
    x_true = np.array(noisy_recovery_truth()[0], dtype=float)
    direction = np.ones(5)
    norms = []
    for t in (1.0, 0.1, 0.01, 0.001):
        # walk out of the feasible region and back toward its boundary
        lo, hi = 0.0, 100.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if bundled.residual(x_true + mid * direction) <= 3.6 + t else (lo, mid)
        norms.append(np.linalg.norm(phi_big_grad(prob, x_true + hi * direction)))
    assert all(a > b for a, b in zip(norms, norms[1:]))
    assert norms[-1] < 1e-2 * norms[0]


def test_hinge_map_is_nonexpansive():
    rng = np.random.default_rng(15)
    for _ in range(1000):
        y1, y2 = rng.normal(scale=3, size=(2, 4))
        sigma = rng.uniform(0, 5)
        assert np.linalg.norm(hinge_shrink(y1, sigma) - hinge_shrink(y2, sigma)) <= np.linalg.norm(y1 - y2) + 1e-12


def test_lipschitz_examples():
    b = np.zeros(3)
    assert lipschitz_bound(SmoothPenaltyProblem(Instance(np.eye(3), b), 1.0, 1.0)) == pytest.approx(1.0)
    A = np.zeros((3, 3))
    A[0, 0], A[1, 1] = 3.0, 1.0
    assert lipschitz_bound(SmoothPenaltyProblem(Instance(A, b), 1.0, 1.0)) == pytest.approx(9.0)


def test_lipschitz_holds_on_random_pairs():
    rng = np.random.default_rng(16)
    A = rng.normal(size=(4, 5))
    prob = SmoothPenaltyProblem(Instance(A, rng.normal(size=4)), 0.7, 1.0)
    L = lipschitz_bound(prob)
    for _ in range(1000):
        x, y = rng.normal(scale=2, size=(2, 5))
        gap = np.linalg.norm(phi_big_grad(prob, x) - phi_big_grad(prob, y))
        assert gap <= L * np.linalg.norm(x - y) * (1 + 1e-9)


def test_problem_validation(bundled):
    with pytest.raises(InvalidInputError):
        SmoothPenaltyProblem(Instance(bundled.A, bundled.b, p=1), 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        SmoothPenaltyProblem(bundled, -1.0, 1.0)
    with pytest.raises(InvalidInputError):
        SmoothPenaltyProblem(bundled, 1.0, 0.0)
    with pytest.raises(InvalidInputError):
        phi_big_eval(SmoothPenaltyProblem(bundled, 1.0, 1.0), np.ones(4))


def test_hard_threshold_keeps_ties():
    np.testing.assert_array_equal(hard_threshold(np.array([0.5, -0.5, 0.4, 2.0]), 0.5), [0.5, -0.5, 0.0, 2.0])


def test_invalid_step(prob):
    cap = 1.0 / lipschitz_bound(prob)
    with pytest.raises(InvalidInputError):
        prox_grad_solve(prob, np.zeros(5), step=1.5 * cap)
    with pytest.raises(InvalidInputError):
        prox_grad_solve(prob, np.zeros(5), step=0.0)
    prox_grad_solve(prob, np.zeros(5), step=cap)


def test_objective_is_monotone(prob):
    rng = np.random.default_rng(17)
    for _ in range(20):
        res = prox_grad_solve(prob, rng.normal(scale=3, size=5), trace=True)
        f = [row[1] for row in res.trace]
        assert all(b <= a + 1e-12 for a, b in zip(f, f[1:]))
        assert res.objective == pytest.approx(objective(prob, res.x))


def test_enumeration_optimum_is_fixed_point(bundled):
    seq = levels(residual_staircase(bundled), SquaredHinge(3.6))
    bp = breakpoints(seq)
    for lam in (0.05, 1.0, 20.0):
        prob = SmoothPenaltyProblem(bundled, 3.6, lam)
        for _, _, x in optimal_set_penalty(seq, bp, lam).representatives:
            res = prox_grad_solve(prob, x)
            assert res.converged
            np.testing.assert_allclose(res.x, x, atol=1e-9)


def test_small_lambda_keeps_zero(bundled):
    seq = levels(residual_staircase(bundled), SquaredHinge(3.6))
    bp = breakpoints(seq)
    prob = SmoothPenaltyProblem(bundled, 3.6, 0.5 * bp.lam[bp.K - 1])
    res = prox_grad_solve(prob, np.zeros(5))
    assert not res.x.any() and res.converged


def test_trace_csv(prob):
    res = prox_grad_solve(prob, np.ones(5), trace=True, max_iters=5)
    buf = io.StringIO()
    write_trace_csv(res, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "iteration,objective,support_size"
    assert len(lines) == len(res.trace) + 1
