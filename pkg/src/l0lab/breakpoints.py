"""
Breakpoints of the penalty marginal function and the optimal-set maps.

The penalty value ``F(lam) = min_i (s_i + lam * rho_i)`` is the lower envelope
of one line per level.  :func:`breakpoints` walks that envelope from large
``lam`` to small, recording where the active line changes and which lines tie
there.  ``H(sigma)``, the optimal value of the residual-constrained problem,
is a step function of the identity-penalty levels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, InvalidInputError

__all__ = [
    "BreakpointSequence",
    "MarginalF",
    "MarginalH",
    "PenaltyOptimum",
    "ConstrainedOptimum",
    "breakpoints",
    "marginal_F",
    "marginal_H",
    "marginal_H_table",
    "optimal_set_penalty",
    "optimal_set_constrained",
    "line_records",
]

RTOL = 1e-9


@dataclass
class BreakpointSequence:
    """``t[0..K]``, ``lam[0..K]`` and tie sets.

    ``tie_sets[0]`` is the seed set ``{0}``; ``tie_sets[i + 1]`` holds the
    levels whose lines meet the active line at ``lam[i]``.
    """

    K: int
    t: list
    lam: list
    tie_sets: list

    def tie_set(self, i):
        """Tie set with the ``-1``-based indexing: ``tie_set(-1) == {0}``."""
        return self.tie_sets[i + 1]

    def lam_before(self, i):
        """``lam[i - 1]`` with ``lam[-1] = +inf``."""
        return math.inf if i == 0 else self.lam[i - 1]

    def to_dict(self):
        return {
            "K": self.K,
            "t": list(self.t),
            "lambda": list(self.lam),
            "tie_sets": [sorted(S) for S in self.tie_sets],
        }


def breakpoints(seq, rtol=RTOL):
    """Walk the lower envelope of ``f_i(lam) = s_i + lam * rho_i``.

    Starting from ``t_0 = 0``, each step takes
    ``lam_i = max_{j > t_i} (s_{t_i} - s_j) / (rho_j - rho_{t_i})``, collects
    the maximizers (ties within relative ``rtol``) into the next tie set, and
    moves to its largest member, until level ``L`` is reached.
    """
    s = seq.s.astype(float)
    rho = seq.rho
    L = seq.L
    ties = [frozenset({0})]
    t, lam = [], []
    while L not in ties[-1]:
        ti = max(ties[-1])
        j = np.arange(ti + 1, L + 1)
        gaps = rho[j] - rho[ti]
        if np.any(gaps <= 0):
            warnings.warn(f"nonpositive residual gap after level {ti}; level values collide numerically")
            gaps = np.where(gaps <= 0, np.finfo(float).tiny, gaps)
        ratios = (s[ti] - s[j]) / gaps
        best = float(ratios.max())
        tied = frozenset(int(v) for v in j[ratios >= best - rtol * abs(best)])
        t.append(ti)
        lam.append(best)
        ties.append(tied)
    t.append(L)
    lam.append(0.0)
    return BreakpointSequence(len(t) - 1, t, lam, ties)


def _close(a, b, rtol=RTOL):
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def _locate(bp, lam, rtol=RTOL):
    """Piece containing ``lam``: returns ``(i, at_breakpoint)``.

    Piece ``i`` is ``(lam[i], lam[i-1]]``; ``at_breakpoint`` is true when
    ``lam`` equals ``lam[i]`` within tolerance (only for ``i < K``).
    """
    for i in range(bp.K):
        if _close(lam, bp.lam[i], rtol):
            return i, True
        if lam > bp.lam[i]:
            return i, False
    return bp.K, False


@dataclass
class MarginalF:
    """Piecewise-linear ``F``; each piece is ``(lam_lo, lam_hi, level, slope, intercept)``.

    Pieces are half-open ``(lam_lo, lam_hi]`` with the first piece unbounded above.
    """

    pieces: list
    bp: BreakpointSequence
    s: np.ndarray
    rho: np.ndarray

    def __call__(self, lam):
        return self.evaluate(lam)[0]

    def evaluate(self, lam):
        """``(F(lam), active level indices)``."""
        if not lam > 0:
            raise InvalidInputError("F is defined for lam > 0 only")
        i, at = _locate(self.bp, lam)
        ti = self.bp.t[i]
        active = {ti} | set(self.bp.tie_set(i)) if at else {ti}
        return float(self.s[ti] + lam * self.rho[ti]), frozenset(active)

    def to_dict(self):
        return {
            "pieces": [
                {"lambda_lo": lo, "lambda_hi": hi, "level": k, "slope": a, "intercept": c}
                for lo, hi, k, a, c in self.pieces
            ]
        }


def marginal_F(seq, bp=None):
    if bp is None:
        bp = breakpoints(seq)
    s, rho = seq.s, seq.rho
    pieces = []
    for i in range(bp.K + 1):
        k = bp.t[i]
        pieces.append((bp.lam[i], bp.lam_before(i), k, float(rho[k]), int(s[k])))
    return MarginalF(pieces, bp, s, rho)


@dataclass
class PenaltyOptimum:
    lam: float
    level_indices: tuple
    representatives: list  # (level, support, x)


def optimal_set_penalty(seq, bp, lam):
    """Levels whose solution sets make up the penalty problem's optimal set at ``lam``.

    Inside a piece only its active level is optimal; at a breakpoint the tied
    levels join in.
    """
    if not lam > 0:
        raise InvalidInputError("penalty parameter must be positive")
    i, at = _locate(bp, lam)
    idx = {bp.t[i]}
    if at:
        idx |= bp.tie_set(i)
    idx = tuple(sorted(idx))
    reps = [(k, S, x) for k in idx for S, x in zip(seq.levels[k].supports, seq.levels[k].representatives)]
    return PenaltyOptimum(float(lam), idx, reps)


def _require_identity(seq):
    if not seq.phi.strictly_increasing or seq.phi.variant not in ("identity", "power") or (
        seq.phi.variant == "power" and seq.phi.p != 1
    ):
        raise InvalidInputError("H is read off levels built with the identity penalty")


def _constrained_index(seq, sigma):
    """``k`` with ``rho_k <= sigma < rho_{k+1}`` (``k = L`` past the last level) and equality flag."""
    rho = seq.rho
    atol = seq.atol
    if sigma < rho[0] - atol:
        raise InfeasibleError(
            f"sigma = {sigma:.6g} is below the smallest attainable residual {rho[0]:.6g}", rho[0]
        )
    k = int(np.flatnonzero(rho <= sigma + atol)[-1])
    return k, abs(sigma - rho[k]) <= atol


@dataclass
class MarginalH:
    """Step function: ``pieces`` are ``(sigma_lo, sigma_hi, value)`` on ``[lo, hi)``."""

    pieces: list

    def __call__(self, sigma):
        for lo, hi, v in self.pieces:
            if lo <= sigma < hi:
                return v
        raise InfeasibleError(f"sigma = {sigma} is below {self.pieces[0][0]}", self.pieces[0][0])

    def to_dict(self):
        return {"pieces": [{"sigma_lo": lo, "sigma_hi": hi, "value": v} for lo, hi, v in self.pieces]}


def marginal_H_table(seq):
    _require_identity(seq)
    rho, s = seq.rho, seq.s
    pieces = [(float(rho[i]), float(rho[i + 1]), int(s[i])) for i in range(seq.L)]
    pieces.append((float(rho[-1]), math.inf, 0))
    return MarginalH(pieces)


def marginal_H(seq, sigma):
    """Fewest nonzeros among ``x`` with ``||Ax - b||_p <= sigma``.

    ``seq`` must be built with the identity penalty.  Raises
    :class:`InfeasibleError` (carrying ``sigma_star``) below the smallest
    attainable residual.
    """
    _require_identity(seq)
    k, _ = _constrained_index(seq, sigma)
    return int(seq.s[k])


@dataclass
class ConstrainedOptimum:
    sigma: float
    k: int
    exact: bool
    representatives: list  # (support, x)


def optimal_set_constrained(seq, sigma):
    """Level ``k`` whose solution set sits inside the constrained optimal set.

    ``exact`` is true when ``sigma`` equals ``rho_k``, in which case the two
    sets coincide; otherwise level ``k`` is only a subset (a strict one for
    ``p = 2``) and the representatives do not exhaust the optimal set.
    """
    _require_identity(seq)
    k, on = _constrained_index(seq, sigma)
    exact = on or k == seq.L
    lv = seq.levels[k]
    return ConstrainedOptimum(float(sigma), k, exact, list(zip(lv.supports, lv.representatives)))


def line_records(seq, bp=None):
    """One record per level line for plotting the envelope.

    Each record carries ``level_index, slope, intercept, lambda_lo, lambda_hi,
    active``.  ``[lambda_lo, lambda_hi]`` bounds where the line is on the
    envelope (a single point for lines that only touch it at a breakpoint);
    both are ``None`` for lines that are never active.
    """
    if bp is None:
        bp = breakpoints(seq)
    where = {}
    for i in range(bp.K + 1):
        where[bp.t[i]] = (bp.lam[i], bp.lam_before(i))
    for i in range(bp.K):
        for k in bp.tie_set(i):
            where.setdefault(k, (bp.lam[i], bp.lam[i]))
    out = []
    for k in range(seq.L + 1):
        lo, hi = where.get(k, (None, None))
        out.append(
            {
                "level_index": k,
                "slope": float(seq.rho[k]),
                "intercept": int(seq.s[k]),
                "lambda_lo": lo,
                "lambda_hi": hi,
                "active": k in where,
            }
        )
    return out
