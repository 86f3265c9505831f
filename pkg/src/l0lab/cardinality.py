"""
Finiteness and strictness of optimal solution sets.

For ``p = 2`` and a penalty with singleton level sets each support carries at
most one optimal point, which bounds the count by a binomial coefficient.
For ``p = 1`` the L1 fit on a support can have a flat optimal face; a point
of that face with many nonzero residuals can be slid along the face without
changing the objective, which certifies infinitely many optima.  Verdicts are
tri-state because the available criteria are only sufficient.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .breakpoints import optimal_set_constrained, optimal_set_penalty
from .errors import DomainError, InvalidInputError, ResourceLimitError
from .linalg import as_vector, l1_optimal_vertices

__all__ = [
    "CardinalityReport",
    "StrictnessReport",
    "check_h2",
    "p2_bound",
    "p1_report",
    "strictness_p2",
    "penalty_cardinality",
    "l1_face_point",
    "l1_second_point",
    "level_infinitude",
]

FINITE, INFINITE, UNKNOWN = "finite", "infinite", "unknown"
H2_MAX_ROWS = 25
ZERO_RTOL = 1e-9


@dataclass
class CardinalityReport:
    level_index: object
    finite: str
    upper_bound: int = None
    witnesses: int = 0
    strict_minimizers: bool = None
    h2_status: list = None
    certificate: list = field(default_factory=list)  # second optimal points backing "infinite"

    def to_dict(self):
        return {
            "level_index": self.level_index,
            "finite": self.finite,
            "upper_bound": self.upper_bound,
            "witnesses": self.witnesses,
            "strict_minimizers": self.strict_minimizers,
            "h2_status": self.h2_status,
            "certificate": [np.asarray(x).tolist() for x in self.certificate],
        }


def check_h2(column, tol=1e-12):
    """True iff no signed sum ``sum_i z_i a_i`` with ``z_i = +-1`` vanishes."""
    a = as_vector(column, name="column")
    m = a.size
    if m > H2_MAX_ROWS:
        raise ResourceLimitError(f"signed-sum test over 2**{m} sign patterns exceeds the {H2_MAX_ROWS}-row limit")
    # z and -z give opposite sums, so the first sign is fixed to +1
    head_len = min(m, 16)
    sums = np.array([a[0]])
    for v in a[1:head_len]:
        sums = np.concatenate([sums + v, sums - v])
    tail = a[head_len:]
    for signs in itertools.product((1.0, -1.0), repeat=tail.size):
        if np.any(np.abs(sums + np.dot(signs, tail)) <= tol):
            return False
    return True


def _zero_atol(seq):
    return ZERO_RTOL * max(1.0, float(np.linalg.norm(seq.instance.b)))


def l1_face_point(seq, support):
    """Relative-interior point of the optimal L1 face on ``support``.

    The centroid of all optimal vertices keeps every residual component that
    is nonzero anywhere on the face nonzero.
    """
    inst = seq.instance
    S = list(support)
    verts = l1_optimal_vertices(inst.A[:, S], inst.b)
    x = np.zeros(inst.n)
    x[S] = np.mean(verts, axis=0)
    return x


def l1_second_point(A, b, x, atol=1e-9):
    """Another point on ``supp(x)`` with the same L1 residual, or ``None``.

    Moves along directions that keep the zero residuals at zero and the
    signed sum of the nonzero residuals fixed, small enough that no sign and
    no coefficient of ``x`` changes.
    """
    A = np.asarray(A, dtype=float)
    S = np.flatnonzero(x)
    if S.size == 0:
        return None
    B = A[:, S]
    r = B @ x[S] - b
    nz = np.abs(r) > atol
    z = np.sign(r[nz])
    C = np.vstack([z @ B[nz], B[~nz]]) if (~nz).any() else (z @ B[nz])[None, :]
    N = scipy.linalg.null_space(C)
    if N.shape[1] == 0:
        return None
    w = N[:, 0]
    Bw = B @ w
    limits = [0.5 * np.min(np.abs(x[S])) / max(np.max(np.abs(w)), 1e-300)]
    moving = nz & (np.abs(Bw) > 0)
    if moving.any():
        limits.append(0.5 * np.min(np.abs(r[moving]) / np.abs(Bw[moving])))
    eps = min(limits)
    y = x.copy()
    y[S] = x[S] + eps * w
    base = np.abs(B @ x[S] - b).sum()
    if abs(np.abs(B @ y[S] - b).sum() - base) > atol * max(1.0, base) or np.allclose(y, x):
        return None
    return y


def _p1_infinite(seq, lv):
    """Face points on this level with enough nonzero residuals, with second points."""
    inst = seq.instance
    atol = _zero_atol(seq)
    if lv.s < 2:
        return []
    certs = []
    for S in lv.supports:
        x = l1_face_point(seq, S)
        nonzero = int(np.count_nonzero(np.abs(inst.A @ x - inst.b) > atol))
        if nonzero >= inst.m + 2 - lv.s:
            y = l1_second_point(inst.A, inst.b, x, atol)
            if y is not None:
                certs.append(y)
    return certs


def _plateau_infinite(seq, lv):
    """Points with residual strictly inside the zero set of phi can be perturbed freely."""
    if lv.s == 0 or seq.phi.singleton_level(lv.rho, seq.atol):
        return []
    inst = seq.instance
    tau = seq.phi.zero_threshold
    certs = []
    for S, x in zip(lv.supports, lv.representatives):
        r = inst.residual(x)
        if r < tau - seq.staircase.tie_atol:
            y = _nudge_on_support(inst, x, tau)
            if y is not None:
                certs.append(y)
    return certs


def _nudge_on_support(inst, x, bound):
    """Same-support point with residual still ``<= bound``."""
    S = np.flatnonzero(x)
    r = inst.residual(x)
    d = np.zeros_like(x)
    d[S] = 1.0
    gain = np.linalg.norm(inst.A @ d, ord=inst.p)
    step = 0.5 * min(np.min(np.abs(x[S])), (bound - r) / max(gain, 1e-300))
    if step <= 0:
        return None
    y = x + step * d
    return y if inst.residual(y) <= bound else None


def level_infinitude(seq, i):
    """``True``/``False`` when level ``i``'s solution set is known infinite/finite, else ``None``."""
    lv = seq.levels[i]
    if lv.s == 0:
        return False
    if seq.instance is None:
        return None
    if _plateau_infinite(seq, lv):
        return True
    if seq.p == 2:
        # one point per support: strict convexity, or the plateau edge is touched at one point
        return False
    singleton = seq.phi.singleton_level(lv.rho, seq.atol)
    if _p1_infinite(seq, lv):
        return True
    if i == seq.L - 1 and lv.s == 1 and singleton and _all_h2(seq):
        return False
    return None


def _all_h2(seq):
    A = seq.instance.A
    return all(check_h2(A[:, j]) for j in range(A.shape[1]))


def _level(seq, k):
    if not 0 <= k <= seq.L:
        raise InvalidInputError(f"level index {k} out of range 0..{seq.L}")
    return seq.levels[k]


def p2_bound(seq, k):
    """Binomial bound on the number of points in level ``k`` (``p = 2``)."""
    lv = _level(seq, k)
    n = seq.instance.n
    if seq.p != 2 or not seq.phi.singleton_level(lv.rho, seq.atol):
        return CardinalityReport(k, UNKNOWN, witnesses=len(lv.supports))
    return CardinalityReport(k, FINITE, math.comb(n, lv.s), len(lv.supports), True)


def p1_report(seq, k):
    """Finiteness verdict for level ``k`` under an L1 residual."""
    lv = _level(seq, k)
    inst = seq.instance
    if seq.p != 1:
        raise InvalidInputError("p1_report needs an L1 instance")
    if k == seq.L:
        return CardinalityReport(k, FINITE, 1, 1, True)
    h2 = [check_h2(inst.A[:, j]) for j in range(inst.n)] if inst.m <= H2_MAX_ROWS else None
    certs = _p1_infinite(seq, lv) or _plateau_infinite(seq, lv)
    if certs:
        return CardinalityReport(k, INFINITE, None, len(lv.supports), False, h2, certs)
    if k == seq.L - 1 and lv.s == 1 and h2 is not None and all(h2) and seq.phi.singleton_level(lv.rho, seq.atol):
        return CardinalityReport(k, FINITE, inst.n * 2**inst.m, len(lv.supports), True, h2)
    return CardinalityReport(k, UNKNOWN, None, len(lv.supports), None, h2)


@dataclass
class StrictnessReport:
    sigma: float
    k: int
    sigma_on_grid: bool
    all_strict: bool
    finite: bool
    residual_equality: bool
    certificate: object = None  # a non-strict optimal point when sigma is off the grid

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "k": self.k,
            "sigma_on_grid": self.sigma_on_grid,
            "all_strict": self.all_strict,
            "finite": self.finite,
            "residual_equality": self.residual_equality,
            "certificate": None if self.certificate is None else np.asarray(self.certificate).tolist(),
        }


def strictness_p2(seq, sigma):
    """Joint verdict: sigma on a level value <=> finitely many optima <=> all strict.

    Needs an L2 instance and identity-penalty levels.
    """
    if seq.p != 2:
        raise InvalidInputError("strictness_p2 needs an L2 instance")
    opt = optimal_set_constrained(seq, sigma)
    inst = seq.instance
    if opt.k == seq.L:
        return StrictnessReport(float(sigma), opt.k, True, True, True, True)
    on = opt.exact
    residual_eq = all(abs(inst.residual(x) - sigma) <= seq.atol for _, x in opt.representatives)
    cert = None
    if not on:
        for _, x in opt.representatives:
            cert = _nudge_on_support(inst, x, sigma)
            if cert is not None:
                break
    return StrictnessReport(float(sigma), opt.k, on, on, on, residual_eq, cert)


def penalty_cardinality(seq, bp, lam):
    """Finiteness of the penalty problem's optimal set at ``lam``.

    Combines the verdicts of the levels active at ``lam``.
    """
    opt = optimal_set_penalty(seq, bp, lam)
    idx = opt.level_indices
    flags = [seq.levels[k].omega_infinite for k in idx]
    witnesses = len(opt.representatives)
    if seq.p == 1:
        reports = [p1_report(seq, k) for k in idx]
        verdicts = [r.finite for r in reports]
        certs = [c for r in reports for c in r.certificate]
        if INFINITE in verdicts:
            return CardinalityReport(list(idx), INFINITE, None, witnesses, False, certificate=certs)
        if all(v == FINITE for v in verdicts):
            bound = sum(r.upper_bound for r in reports)
            return CardinalityReport(list(idx), FINITE, bound, witnesses, True)
        return CardinalityReport(list(idx), UNKNOWN, None, witnesses)
    if any(f is True for f in flags):
        certs = [c for k in idx for c in _plateau_infinite(seq, seq.levels[k])]
        return CardinalityReport(list(idx), INFINITE, None, witnesses, False, certificate=certs)
    if all(seq.phi.singleton_level(seq.levels[k].rho, seq.atol) for k in idx):
        n = seq.instance.n
        bound = sum(math.comb(n, int(seq.levels[k].s)) for k in idx)
        return CardinalityReport(list(idx), FINITE, bound, witnesses, True)
    if all(f is False for f in flags):
        return CardinalityReport(list(idx), FINITE, None, witnesses, True)
    return CardinalityReport(list(idx), UNKNOWN, None, witnesses)
