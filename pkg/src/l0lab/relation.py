"""
How the penalty problem's optimal set relates to the constrained one.

Given a residual bound ``sigma``, the constrained optimum sits at the level
``k`` with ``rho_k <= phi(sigma) < rho_{k+1}``.  Whether any penalty
parameter recovers it depends only on where ``k`` falls in the breakpoint
structure: on the envelope for a whole interval, at a single breakpoint, or
never.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .breakpoints import BreakpointSequence, breakpoints
from .bruteforce import constrained_optimum, penalty_optimum, support_table
from .errors import DomainError, InfeasibleError, PreconditionError
from .levels import LevelSequence, levels, residual_staircase
from .phi import Power, phi_properties

__all__ = [
    "Case",
    "RelationReport",
    "ThresholdResult",
    "ExactnessCheck",
    "ExactnessReport",
    "classify",
    "noiseless_threshold",
    "exact_penalty_threshold",
    "verify_exactness",
]


class Case(enum.Enum):
    IN_T = "IN_T"
    IN_TIESETS_NOT_T = "IN_TIESETS_NOT_T"
    NEVER = "NEVER"


_DESCRIPTION = {
    Case.IN_T: "penalty optima lie inside the constrained optimal set on an open interval of lambda",
    Case.IN_TIESETS_NOT_T: "the two optimal sets meet only at a single breakpoint",
    Case.NEVER: "no penalty parameter yields a common optimal solution",
}


@dataclass
class RelationReport:
    sigma: float
    k: int
    case: Case
    j: int = None
    # (lo, hi) open interval for IN_T, (lam, lam) for a single point, None for NEVER
    lambda_window: tuple = None
    intersection_level: int = None
    inside_window: str = "disjoint"  # "equal" | "strict_subset" | "subset" | "disjoint"

    @property
    def description(self):
        return _DESCRIPTION[self.case]

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "k": self.k,
            "case": self.case.value,
            "description": self.description,
            "j": self.j,
            "lambda_window": None if self.lambda_window is None else list(self.lambda_window),
            "intersection_level": self.intersection_level,
            "inside_window": self.inside_window,
        }


def classify(seq: LevelSequence, bp: BreakpointSequence, sigma, p=None):
    """Classify the penalty/constrained relationship for bound ``sigma``.

    ``seq`` must be built with the penalty function of interest (typically
    ``Power(p)``), and ``bp`` from ``seq``.  ``p`` defaults to the instance's
    norm; for synthetic sequences it only decides whether the in-window
    inclusion is reported as strict.
    """
    phi = seq.phi
    if p is None:
        p = seq.p if seq.p is not None else 2
    if bp is None:
        bp = breakpoints(seq)
    atol = seq.atol
    if seq.staircase is not None:
        st = seq.staircase
        sigma_star, bnorm = float(st.best_r[-1]), float(st.best_r[0])
        if not (sigma_star - st.tie_atol <= sigma < bnorm):
            raise DomainError(f"sigma must lie in [{sigma_star:.6g}, {bnorm:.6g}), got {sigma}")
    y = float(phi(sigma))
    rho = seq.rho
    if not (rho[0] - atol <= y < rho[-1] - atol):
        raise DomainError(f"phi(sigma) = {y:.6g} outside [{rho[0]:.6g}, {rho[-1]:.6g})")
    k = int(np.flatnonzero(rho <= y + atol)[-1])
    on_level = abs(y - rho[k]) <= atol

    if k in bp.t:
        j = bp.t.index(k)
        if on_level:
            inside = "equal"
        else:
            inside = "strict_subset" if p == 2 else "subset"
        return RelationReport(float(sigma), k, Case.IN_T, j, (bp.lam[j], bp.lam_before(j)), k, inside)
    for j in range(bp.K):
        if k in bp.tie_set(j):
            return RelationReport(float(sigma), k, Case.IN_TIESETS_NOT_T, j, (bp.lam[j], bp.lam[j]), k, "disjoint")
    return RelationReport(float(sigma), k, Case.NEVER)


@dataclass
class ThresholdResult:
    """``lambda_star`` beyond which the two problems share optimal sets.

    ``all_lambda_exact`` flags the degenerate case where every ``lam > 0`` works.
    """

    lambda_star: float
    all_lambda_exact: bool
    levels: LevelSequence = None
    breakpoints: BreakpointSequence = None

    def to_dict(self):
        return {
            "lambda_star": self.lambda_star,
            "all_lambda_exact": self.all_lambda_exact,
            "levels": None if self.levels is None else self.levels.to_dict(),
            "breakpoints": None if self.breakpoints is None else self.breakpoints.to_dict(),
        }


def noiseless_threshold(inst, phi=None, st=None):
    """Penalty threshold for the sparsest solution of ``Ax = b``.

    Requires a consistent system.  ``phi`` defaults to ``z**p / p``.
    """
    phi = Power(inst.p) if phi is None else phi
    st = residual_staircase(inst) if st is None else st
    if st.best_r[-1] > st.tie_atol:
        raise InfeasibleError(
            f"Ax = b has no solution: smallest residual is {st.best_r[-1]:.6g}", st.best_r[-1]
        )
    if st.best_r[0] == 0.0:
        return ThresholdResult(0.0, True)
    seq = levels(st, phi)
    bp = breakpoints(seq)
    return ThresholdResult(float(bp.lam[0]), False, seq, bp)


def exact_penalty_threshold(inst, phi, sigma, st=None):
    """Threshold above which ``min ||x||_0 + lam * phi(||Ax - b||_p)`` is exact.

    ``phi`` must vanish exactly on ``[0, sigma]`` and be positive beyond;
    then the penalty's densest level coincides with the constrained optimal
    set and the threshold is the first breakpoint under ``phi``.
    """
    if not phi_properties(phi).exact_for(sigma):
        raise PreconditionError(
            f"phi = {phi} must vanish exactly on [0, {sigma}] and be positive beyond it; "
            f"its zero set ends at {phi.zero_threshold}"
        )
    st = residual_staircase(inst) if st is None else st
    if sigma < st.best_r[-1] - st.tie_atol:
        raise InfeasibleError(
            f"sigma = {sigma:.6g} is below the smallest attainable residual {st.best_r[-1]:.6g}", st.best_r[-1]
        )
    seq = levels(st, phi)
    bp = breakpoints(seq)
    if sigma >= st.best_r[0]:
        return ThresholdResult(0.0, True, seq, bp)
    return ThresholdResult(float(bp.lam[0]), False, seq, bp)


@dataclass
class ExactnessCheck:
    lam: float
    above_threshold: bool
    penalty_value: float
    constrained_value: int
    penalty_supports: list
    constrained_supports: list
    passed: bool


@dataclass
class ExactnessReport:
    lambda_star: float
    checks: list = field(default_factory=list)

    @property
    def all_passed_above_threshold(self):
        return all(c.passed for c in self.checks if c.above_threshold)

    def to_dict(self):
        return {
            "lambda_star": self.lambda_star,
            "checks": [
                {
                    "lambda": c.lam,
                    "above_threshold": c.above_threshold,
                    "penalty_value": c.penalty_value,
                    "constrained_value": c.constrained_value,
                    "penalty_supports": c.penalty_supports,
                    "constrained_supports": c.constrained_supports,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def verify_exactness(inst, phi, sigma, lambda_samples, table=None):
    """Brute-force both problems at each sampled ``lam`` and compare optimal supports.

    Only samples above the threshold are guaranteed to pass; the others are
    reported as they come out.
    """
    thr = exact_penalty_threshold(inst, phi, sigma)
    table = support_table(inst.A, inst.b, inst.p) if table is None else table
    h, csup = constrained_optimum(table, sigma)
    report = ExactnessReport(thr.lambda_star)
    for lam in lambda_samples:
        value, psup = penalty_optimum(table, phi, lam)
        passed = psup == csup and math.isclose(value, h, rel_tol=1e-9, abs_tol=1e-9)
        report.checks.append(
            ExactnessCheck(float(lam), lam > thr.lambda_star, value, h, sorted(psup), sorted(csup), passed)
        )
    return report
