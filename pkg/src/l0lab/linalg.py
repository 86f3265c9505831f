"""
Small dense linear-algebra kernels.

Everything here works on plain ``numpy`` arrays and is meant for desk-scale
problems (a handful of rows and columns).  The least absolute deviation solver
enumerates basic solutions instead of calling an LP code, so its output is a
genuine vertex and is reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError

__all__ = [
    "LsResult",
    "L1Result",
    "as_matrix",
    "as_vector",
    "least_squares",
    "l1_regression",
    "l1_optimal_vertices",
    "numerical_rank",
    "independent_columns",
    "spectral_norm",
]

RANK_TOL = 1e-10


@dataclass
class LsResult:
    minimizer: np.ndarray
    residual_norm: float
    rank_used: int


@dataclass
class L1Result:
    minimizer: np.ndarray
    residual_l1: float
    zeroed_rows: tuple


def as_matrix(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return M


def as_vector(v, size=None, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError(f"{name} must be 1-D, got shape {v.shape}")
    if size is not None and v.shape[0] != size:
        raise InvalidInputError(f"{name} has length {v.shape[0]}, expected {size}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return v


def numerical_rank(M, tol=RANK_TOL):
    """Rank from a column-pivoted QR factorization.

    Counts the diagonal entries of ``R`` whose magnitude exceeds
    ``tol * max|R_ii|``.  The zero matrix has rank 0.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    M = as_matrix(M)
    R = scipy.linalg.qr(M, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    return int(np.count_nonzero(diag > tol * diag[0]))


def independent_columns(M, tol=RANK_TOL):
    """Greedy left-to-right maximal set of linearly independent columns."""
    M = as_matrix(M)
    keep = []
    for j in range(M.shape[1]):
        trial = keep + [j]
        if numerical_rank(M[:, trial], tol) == len(trial):
            keep = trial
    return keep


def least_squares(M, v, tol=RANK_TOL):
    """Minimum-norm minimizer of ``||M y - v||_2``.

    Parameters
    ----------
    M : (m, d) array_like
    v : (m,) array_like
    tol : float
        Relative rank tolerance.

    Returns
    -------
    LsResult
        The pseudo-inverse solution, its residual norm and the numerical rank
        of ``M`` that was used to form it.
    """
    M = as_matrix(M)
    v = as_vector(v, M.shape[0])
    rank = numerical_rank(M, tol)
    d = M.shape[1]
    if rank == 0:
        y = np.zeros(d)
    elif rank == d:
        Q, R = np.linalg.qr(M)
        y = scipy.linalg.solve_triangular(R, Q.T @ v)
    else:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        y = Vt[:rank].T @ ((U[:, :rank].T @ v) / s[:rank])
    return LsResult(y, float(np.linalg.norm(M @ y - v)), rank)


def _basic_solutions(M, v, tol):
    # (rows, y, l1 residual) for every invertible square row block, lexicographic in rows
    m, d = M.shape
    for rows in itertools.combinations(range(m), d):
        block = M[list(rows)]
        if numerical_rank(block, tol) < d:
            continue
        y = np.linalg.solve(block, v[list(rows)])
        yield rows, y, float(np.abs(M @ y - v).sum())


def _reduce_columns(M, tol):
    cols = independent_columns(M, tol)
    return cols, M[:, cols]


def l1_regression(M, v, tol=RANK_TOL):
    """Global minimizer of ``||M y - v||_1`` by basic-solution enumeration.

    With ``r = rank(M)`` columns kept (a greedy maximal independent subset),
    every ``r``-row subset with an invertible square block is solved exactly
    and the smallest residual wins.  Ties go to the lexicographically smallest
    row subset, so the answer is a deterministic vertex of the optimal face.
    Dropped columns get zero coefficients.
    """
    M = as_matrix(M)
    v = as_vector(v, M.shape[0])
    d = M.shape[1]
    cols, Mr = _reduce_columns(M, tol)
    y = np.zeros(d)
    if not cols:
        return L1Result(y, float(np.abs(v).sum()), ())
    best = None
    for rows, yr, res in _basic_solutions(Mr, v, tol):
        # strictly better beyond roundoff, so earlier subsets win ties
        if best is None or res < best[2] - 1e-12 * max(1.0, best[2]):
            best = (rows, yr, res)
    rows, yr, _ = best
    y[cols] = yr
    return L1Result(y, float(np.abs(M @ y - v).sum()), tuple(rows))


def l1_optimal_vertices(M, v, tol=RANK_TOL, rtol=1e-9):
    """All distinct optimal basic solutions of ``min ||M y - v||_1``.

    Their convex hull is the optimal face when ``M`` has full column rank,
    so the centroid of the returned vertices lies in its relative interior.
    """
    M = as_matrix(M)
    v = as_vector(v, M.shape[0])
    d = M.shape[1]
    cols, Mr = _reduce_columns(M, tol)
    if not cols:
        return [np.zeros(d)]
    sols = list(_basic_solutions(Mr, v, tol))
    best = min(res for _, _, res in sols)
    out = []
    for _, yr, res in sols:
        if res <= best + rtol * max(1.0, best):
            y = np.zeros(d)
            y[cols] = yr
            if not any(np.allclose(y, w, rtol=1e-12, atol=1e-12) for w in out):
                out.append(y)
    return out


def _power_iteration(G, x, tol, max_iter):
    est = 0.0
    for it in range(1, max_iter + 1):
        y = G @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0, True
        new = float(x @ y)
        x = y / ny
        if abs(new - est) <= tol * abs(new):
            return new, True
        est = new
    return est, False


def spectral_norm(M, tol=1e-13, max_iter=10_000, full_output=False):
    """Largest singular value of ``M`` by power iteration on ``M^T M``.

    The iteration starts from the normalized all-ones vector.  A second
    deterministic start (an alternating ramp) is also run and the larger
    estimate kept, which guards against the all-ones vector being orthogonal
    to the dominant singular direction.

    If ``full_output`` is true, returns ``(value, converged)``.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    M = as_matrix(M)
    G = M.T @ M
    n = G.shape[0]
    starts = [np.ones(n), (-1.0) ** np.arange(n) * np.arange(1, n + 1)]
    best, converged = 0.0, True
    for x0 in starts:
        eig, ok = _power_iteration(G, x0 / np.linalg.norm(x0), tol, max_iter)
        if eig > best:
            best, converged = eig, ok
    value = float(np.sqrt(max(best, 0.0)))
    if not converged:
        warnings.warn(f"power iteration hit {max_iter} iterations without converging")
    return (value, converged) if full_output else value
