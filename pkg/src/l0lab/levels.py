"""
Residual staircase and level sequence by exhaustive support enumeration.

For every support ``S`` of the columns of ``A`` the best residual
``min ||A_S z - b||_p`` is computed once.  The staircase ``best_r[k]`` is the
smallest of those residuals over ``|S| <= k``; the level sequence (the
alternating "best residual, then sparsest support reaching it" iteration) is
read off the staircase for any penalty function.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .linalg import as_matrix, as_vector, l1_regression, least_squares, numerical_rank
from .phi import Identity, PhiSpec

__all__ = [
    "Instance",
    "ResidualStaircase",
    "Level",
    "LevelSequence",
    "load_instance",
    "residual_staircase",
    "levels",
    "level_representatives",
    "support_budget",
]

TIE_RTOL = 1e-9
LEVEL_TOL = 1e-9
DEFAULT_MAX_SUPPORTS = 2_000_000


def support_budget():
    """Cap on the number of supports one enumeration may visit."""
    raw = os.environ.get("L0LAB_MAX_SUPPORTS")
    if raw is None:
        return DEFAULT_MAX_SUPPORTS
    try:
        return int(raw)
    except ValueError:
        raise InvalidInputError(f"L0LAB_MAX_SUPPORTS must be an integer, got {raw!r}") from None


@dataclass
class Instance:
    """Dense problem data ``(A, b)`` with the residual norm ``p`` in {1, 2}."""

    A: np.ndarray
    b: np.ndarray
    p: int = 2
    max_enumeration_cols: int = 20

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.b = as_vector(self.b, self.A.shape[0], "b")
        if self.p not in (1, 2):
            raise InvalidInputError(f"p must be 1 or 2, got {self.p!r}")

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]

    def norm(self, r):
        return float(np.linalg.norm(r, ord=self.p))

    def residual(self, x):
        return self.norm(self.A @ np.asarray(x, dtype=float) - self.b)

    def to_dict(self):
        return {"A": self.A.tolist(), "b": self.b.tolist(), "p": self.p}

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise InvalidInputError("instance must be a JSON object")
        missing = {"A", "b"} - d.keys()
        if missing:
            raise InvalidInputError(f"instance is missing field(s) {sorted(missing)}")
        A = d["A"]
        if not isinstance(A, list) or not A or not all(isinstance(r, list) for r in A):
            raise InvalidInputError("field 'A' must be a non-empty array of arrays")
        widths = {len(r) for r in A}
        if len(widths) != 1:
            raise InvalidInputError(f"rows of 'A' have differing lengths {sorted(widths)}")
        try:
            return cls(np.array(A, dtype=float), np.array(d["b"], dtype=float), int(d.get("p", 2)))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"non-numeric entry in instance: {exc}") from None


def load_instance(path):
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return Instance.from_dict(data)


@dataclass
class ResidualStaircase:
    """Per-support residuals and the best residual for each cardinality budget.

    ``supports[j]`` is a sorted index tuple; ``residuals[j]`` and
    ``minimizers[j]`` hold its best residual and canonical minimizer (minimum
    norm least squares for ``p = 2``, lexicographic L1 vertex for ``p = 1``).
    Supports are ordered by size, then lexicographically.
    """

    instance: Instance
    supports: list
    residuals: np.ndarray
    minimizers: np.ndarray
    exact_r: np.ndarray
    best_r: np.ndarray
    rank: int

    @property
    def tie_atol(self):
        return TIE_RTOL * max(1.0, float(self.best_r[0]))

    def achieving_supports(self, k):
        """Supports with ``|S| <= k`` attaining ``best_r[k]`` within tolerance."""
        target = self.best_r[k] + self.tie_atol
        return [
            (S, self.minimizers[j])
            for j, S in enumerate(self.supports)
            if len(S) <= k and self.residuals[j] <= target
        ]

    @property
    def sizes(self):
        return np.fromiter((len(S) for S in self.supports), dtype=int, count=len(self.supports))


def residual_staircase(inst):
    """Exhaustively evaluate every support of ``inst.A``.

    Raises
    ------
    ResourceLimitError
        If ``n`` exceeds ``inst.max_enumeration_cols`` or the total support
        count ``sum_k C(n, k) = 2**n`` exceeds ``L0LAB_MAX_SUPPORTS``.
    """
    n = inst.n
    total = 2**n
    if n > inst.max_enumeration_cols or total > support_budget():
        worst = n // 2
        raise ResourceLimitError(
            f"enumerating supports of {n} columns needs sum_k C({n},k) = {total} subproblems "
            f"(largest layer C({n},{worst}) = {math.comb(n, worst)}); limit is "
            f"{inst.max_enumeration_cols} columns / {support_budget()} supports"
        )
    solve = least_squares if inst.p == 2 else l1_regression
    supports, residuals, minimizers = [], [], []
    exact_r = np.empty(n + 1)
    for k in range(n + 1):
        layer_best = math.inf
        for S in itertools.combinations(range(n), k):
            x = np.zeros(n)
            if k == 0:
                r = inst.norm(inst.b)
            else:
                res = solve(inst.A[:, S], inst.b)
                x[list(S)] = res.minimizer
                r = inst.residual(x)
            supports.append(S)
            residuals.append(r)
            minimizers.append(x)
            layer_best = min(layer_best, r)
        exact_r[k] = layer_best
    best_r = np.minimum.accumulate(exact_r)
    return ResidualStaircase(
        inst, supports, np.array(residuals), np.array(minimizers), exact_r, best_r, numerical_rank(inst.A)
    )


@dataclass
class Level:
    index: int
    s: int
    rho: float
    supports: list = field(default_factory=list)
    representatives: list = field(default_factory=list)
    # True / False when decided, None when no criterion applies
    omega_infinite: object = None

    def to_dict(self):
        return {
            "index": self.index,
            "s": self.s,
            "rho": self.rho,
            "supports": [list(S) for S in self.supports],
            "representatives": [np.asarray(x).tolist() for x in self.representatives],
            "omega_infinite": self.omega_infinite,
        }


@dataclass
class LevelSequence:
    """Levels ``(s_i, rho_i)``, ``i = 0..L``, with achieving supports.

    ``s`` strictly decreases to 0 and ``rho`` strictly increases to
    ``phi(||b||_p)``.  ``staircase`` is ``None`` for sequences built directly
    from numbers with :meth:`from_values`.
    """

    phi: PhiSpec
    levels: list
    staircase: ResidualStaircase = None
    tol: float = LEVEL_TOL

    @property
    def L(self):
        return len(self.levels) - 1

    @property
    def s(self):
        return np.array([lv.s for lv in self.levels], dtype=int)

    @property
    def rho(self):
        return np.array([lv.rho for lv in self.levels], dtype=float)

    @property
    def atol(self):
        return self.tol * max(1.0, float(self.levels[-1].rho))

    @property
    def instance(self):
        return None if self.staircase is None else self.staircase.instance

    @property
    def p(self):
        return None if self.staircase is None else self.staircase.instance.p

    @classmethod
    def from_values(cls, s, rho, phi=None, tol=LEVEL_TOL):
        """Wrap a bare ``(s, rho)`` table, e.g. synthetic data for the breakpoint engine."""
        s = [int(v) for v in s]
        rho = [float(v) for v in rho]
        if len(s) != len(rho) or not s:
            raise InvalidInputError("s and rho must be non-empty and of equal length")
        if s[-1] != 0 or any(a <= b for a, b in zip(s, s[1:])):
            raise InvalidInputError("s must strictly decrease to 0")
        if any(a >= b for a, b in zip(rho, rho[1:])) or rho[0] < 0:
            raise InvalidInputError("rho must be nonnegative and strictly increasing")
        lv = [Level(i, si, ri) for i, (si, ri) in enumerate(zip(s, rho))]
        lv[-1].omega_infinite = False
        return cls(phi if phi is not None else Identity(), lv, None, tol)

    def to_dict(self):
        return {
            "phi": self.phi.to_dict(),
            "L": self.L,
            "s": self.s.tolist(),
            "rho": self.rho.tolist(),
            "levels": [lv.to_dict() for lv in self.levels],
        }


def levels(st, phi=None, tol=LEVEL_TOL):
    """Level sequence of a staircase under the penalty ``phi``.

    ``rho_0 = phi(best_r[n])`` and ``s_0`` is the smallest ``k`` with
    ``phi(best_r[k]) = rho_0``; then ``rho_{i+1} = phi(best_r[s_i - 1])`` and
    ``s_{i+1}`` is again the smallest ``k`` reaching it, until ``s = 0``.
    Values are compared with absolute tolerance ``tol * max(1, phi(||b||))``.
    """
    from .cardinality import level_infinitude

    phi = Identity() if phi is None else phi
    vals = np.asarray(phi(st.best_r), dtype=float)
    n = len(vals) - 1
    atol = tol * max(1.0, float(vals[0]))

    def sparsest(rho):
        return int(np.flatnonzero(np.abs(vals - rho) <= atol)[0])

    phi_res = np.asarray(phi(st.residuals), dtype=float)
    sizes = st.sizes
    out = []
    rho = float(vals[n])
    s = sparsest(rho)
    while True:
        hit = np.flatnonzero((sizes == s) & (np.abs(phi_res - rho) <= atol))
        lv = Level(len(out), s, rho, [st.supports[j] for j in hit], [st.minimizers[j].copy() for j in hit])
        out.append(lv)
        if s == 0:
            break
        rho = float(vals[s - 1])
        s = sparsest(rho)
    seq = LevelSequence(phi, out, st, tol)
    for lv in out:
        lv.omega_infinite = level_infinitude(seq, lv.index)
    return seq


def level_representatives(seq, i):
    """``(support, minimizer)`` pairs for level ``i``, one per achieving support."""
    if not 0 <= i <= seq.L:
        raise InvalidInputError(f"level index {i} out of range 0..{seq.L}")
    lv = seq.levels[i]
    return list(zip(lv.supports, lv.representatives))
