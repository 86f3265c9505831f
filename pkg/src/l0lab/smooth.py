"""
Smooth exact penalty ``Phi(x) = 0.5 * (||Ax - b||_2 - sigma)_+**2`` and a
hard-thresholding proximal-gradient solver for ``||x||_0 + lam * Phi(x)``.

The solver is a local method; it is here to be checked against exhaustive
enumeration, not as a substitute for it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .linalg import as_vector, spectral_norm

__all__ = [
    "SmoothPenaltyProblem",
    "ProxGradResult",
    "phi_big_eval",
    "phi_big_grad",
    "hinge_shrink",
    "lipschitz_bound",
    "hard_threshold",
    "objective",
    "prox_grad_solve",
    "write_trace_csv",
]


@dataclass
class SmoothPenaltyProblem:
    instance: object
    sigma: float
    lam: float

    def __post_init__(self):
        if self.instance.p != 2:
            raise InvalidInputError("the smooth penalty is defined for the L2 residual")
        if not self.sigma >= 0:
            raise InvalidInputError("sigma must be nonnegative")
        if not self.lam > 0:
            raise InvalidInputError("lambda must be positive")


def _x(prob, x):
    return as_vector(x, prob.instance.n, "x")


def phi_big_eval(prob, x):
    r = np.linalg.norm(prob.instance.A @ _x(prob, x) - prob.instance.b)
    return 0.5 * max(r - prob.sigma, 0.0) ** 2


def hinge_shrink(y, sigma):
    """``(1 - sigma / ||y||)_+ * y``: the residual-space gradient of the hinge."""
    y = np.asarray(y, dtype=float)
    ny = np.linalg.norm(y)
    if ny <= sigma:
        return np.zeros_like(y)
    return (1.0 - sigma / ny) * y


def phi_big_grad(prob, x):
    A = prob.instance.A
    return A.T @ hinge_shrink(A @ _x(prob, x) - prob.instance.b, prob.sigma)


def lipschitz_bound(prob):
    """Lipschitz constant ``||A||_2**2`` of the gradient."""
    return spectral_norm(prob.instance.A) ** 2


def hard_threshold(v, thresh):
    # entries exactly at the threshold are kept
    out = v.copy()
    out[np.abs(v) < thresh] = 0.0
    return out


def objective(prob, x):
    return float(np.count_nonzero(x) + prob.lam * phi_big_eval(prob, x))


@dataclass
class ProxGradResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)  # (iteration, objective, support size)


def prox_grad_solve(prob, x0, max_iters=10_000, step=None, trace=False, tol=1e-12):
    """Iterative hard thresholding on ``||x||_0 + lam * Phi(x)``.

    Each step is ``x <- HT(x - step * lam * grad Phi(x), sqrt(2 * step))``.
    With ``step <= 1 / (lam * ||A||_2**2)`` the objective never increases.
    Stops once the support is unchanged and the objective moves by less than
    ``tol``.
    """
    L = lipschitz_bound(prob)
    cap = 1.0 / (prob.lam * L) if L > 0 else np.inf
    if step is None:
        step = 0.99 * cap if np.isfinite(cap) else 1.0
    if not (0 < step <= cap * (1 + 1e-12)):
        raise InvalidInputError(f"step must lie in (0, 1/(lam*||A||^2)] = (0, {cap:.6g}], got {step}")
    thresh = np.sqrt(2.0 * step)
    A, b, sigma, lam = prob.instance.A, prob.instance.b, prob.sigma, prob.lam

    # residual computed once per iterate, shared by objective and gradient
    def f_and_r(x):
        r = A @ x - b
        return float(np.count_nonzero(x) + lam * 0.5 * max(np.linalg.norm(r) - sigma, 0.0) ** 2), r

    x = _x(prob, x0).copy()
    f, r = f_and_r(x)
    rows = [(0, f, int(np.count_nonzero(x)))] if trace else []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        x_new = hard_threshold(x - step * lam * (A.T @ hinge_shrink(r, sigma)), thresh)
        f_new, r = f_and_r(x_new)
        same = np.array_equal(x_new != 0, x != 0)
        x, f_old, f = x_new, f, f_new
        if trace:
            rows.append((it, f, int(np.count_nonzero(x))))
        if same and abs(f_old - f) <= tol:
            converged = True
            break
    return ProxGradResult(x, f, it, converged, rows)


def write_trace_csv(result, path_or_file):
    """Write ``iteration,objective,support_size`` rows."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(["iteration", "objective", "support_size"])
        for it, f, k in result.trace:
            w.writerow([it, repr(f), k])
    finally:
        if own:
            fh.close()
