"""
Penalty functions applied to the residual norm.

Every member of the family is continuous, nondecreasing and vanishes at zero.
The family is closed on purpose: the analyses downstream need exact answers
to questions such as "is phi strictly increasing?" or "how many z solve
phi(z) = rho?", which cannot be answered for an arbitrary callable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "PhiSpec",
    "PhiProperties",
    "Identity",
    "Power",
    "ShiftedPower",
    "SquaredHinge",
    "phi_eval",
    "phi_properties",
]

VARIANTS = ("identity", "power", "shifted_power", "squared_hinge")


@dataclass(frozen=True)
class PhiSpec:
    variant: str
    p: int = 1
    sigma: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"unknown penalty variant {self.variant!r}")
        if self.p not in (1, 2):
            raise InvalidInputError(f"p must be 1 or 2, got {self.p}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise InvalidInputError(f"sigma must be a finite nonnegative number, got {self.sigma}")

    def __call__(self, z):
        return phi_eval(self, z)

    @property
    def strictly_increasing(self):
        return self.variant in ("identity", "power") or self.sigma == 0.0

    @property
    def zero_threshold(self):
        return 0.0 if self.strictly_increasing else float(self.sigma)

    def singleton_level(self, rho, atol=0.0):
        """True iff exactly one z >= 0 satisfies phi(z) = rho."""
        if self.strictly_increasing:
            return True
        return rho > atol

    def to_dict(self):
        d = {"variant": self.variant}
        if self.variant in ("power", "shifted_power"):
            d["p"] = self.p
        if self.variant in ("shifted_power", "squared_hinge"):
            d["sigma"] = self.sigma
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["variant"], int(d.get("p", 1)), float(d.get("sigma", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad penalty specification {d!r}: {exc}") from None

    def __str__(self):
        if self.variant == "identity":
            return "z"
        if self.variant == "power":
            return "z" if self.p == 1 else "z^2/2"
        if self.variant == "shifted_power":
            return f"(z^{self.p} - {self.sigma:g}^{self.p})_+"
        return f"(z - {self.sigma:g})_+^2/2"


def Identity():
    return PhiSpec("identity")


def Power(p=2):
    """``z**p / p``; the least-squares penalty for ``p = 2``."""
    return PhiSpec("power", p=p)


def ShiftedPower(sigma, p=2):
    """``(z**p - sigma**p)_+``."""
    return PhiSpec("shifted_power", p=p, sigma=float(sigma))


def SquaredHinge(sigma):
    """``(z - sigma)_+**2 / 2``."""
    return PhiSpec("squared_hinge", sigma=float(sigma))


def phi_eval(spec, z):
    """Evaluate ``spec`` at ``z`` (scalar or array, must be nonnegative)."""
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise InvalidInputError("phi is only defined for z >= 0")
    v = spec.variant
    if v == "identity":
        out = arr
    elif v == "power":
        out = arr**spec.p / spec.p
    elif v == "shifted_power":
        out = np.maximum(arr**spec.p - spec.sigma**spec.p, 0.0)
    else:
        out = 0.5 * np.maximum(arr - spec.sigma, 0.0) ** 2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhiProperties:
    strictly_increasing: bool
    zero_threshold: float

    def exact_for(self, sigma, rtol=1e-12):
        """True iff phi vanishes exactly on ``[0, sigma]`` and is positive beyond."""
        return math.isclose(self.zero_threshold, sigma, rel_tol=rtol, abs_tol=1e-15)


def phi_properties(spec):
    return PhiProperties(spec.strictly_increasing, spec.zero_threshold)
