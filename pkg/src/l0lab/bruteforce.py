"""
Independent brute-force solvers used to cross-check the level machinery.

These deliberately share no code with :mod:`l0lab.linalg` or
:mod:`l0lab.levels`: per-support residuals come from ``numpy.linalg.lstsq``
(``p = 2``) or a HiGHS linear program (``p = 1``), and optimal sets are taken
directly over all supports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

__all__ = ["SupportTable", "support_table", "penalty_optimum", "constrained_optimum"]


def _l1_fit(B, b):
    m, d = B.shape
    # variables (z, u): minimize sum(u) subject to -u <= B z - b <= u
    c = np.concatenate([np.zeros(d), np.ones(m)])
    I = np.eye(m)
    A_ub = np.block([[B, -I], [-B, -I]])
    b_ub = np.concatenate([b, -b])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * d + [(0, None)] * m, method="highs")
    if not res.success:
        raise RuntimeError(res.message)
    z = res.x[:d]
    return z, float(np.abs(B @ z - b).sum())


def _l2_fit(B, b):
    z = np.linalg.lstsq(B, b, rcond=None)[0]
    return z, float(np.linalg.norm(B @ z - b))


@dataclass
class SupportTable:
    supports: list
    sizes: np.ndarray
    residuals: np.ndarray
    points: np.ndarray


def support_table(A, b, p):
    """Best residual and a minimizer for every column subset."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    fit = _l2_fit if p == 2 else _l1_fit
    supports, res, pts = [], [], []
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            x = np.zeros(n)
            if k:
                z, _ = fit(A[:, S], b)
                x[list(S)] = z
            supports.append(S)
            res.append(float(np.linalg.norm(A @ x - b, ord=p)))
            pts.append(x)
    return SupportTable(supports, np.array([len(S) for S in supports]), np.array(res), np.array(pts))


def penalty_optimum(table, phi, lam, rtol=1e-9):
    """``(value, optimal supports)`` of ``min ||x||_0 + lam * phi(||Ax - b||_p)``."""
    obj = table.sizes + lam * np.asarray(phi(table.residuals), dtype=float)
    best = float(obj.min())
    hit = np.flatnonzero(obj <= best + rtol * max(1.0, best))
    return best, {table.supports[j] for j in hit}


def constrained_optimum(table, sigma, rtol=1e-9):
    """``(fewest nonzeros, optimal supports)`` subject to ``||Ax - b||_p <= sigma``.

    Returns ``(None, set())`` when no support is feasible.
    """
    ok = table.residuals <= sigma + rtol * max(1.0, sigma)
    if not ok.any():
        return None, set()
    h = int(table.sizes[ok].min())
    return h, {table.supports[j] for j in np.flatnonzero(ok & (table.sizes == h))}
