"""Bundled example data."""

from __future__ import annotations

import json
from importlib import resources

from .levels import Instance, LevelSequence

__all__ = ["noisy_recovery_instance", "noisy_recovery_truth", "synthetic_levels", "fixture_path"]


def fixture_path(name):
    return resources.files("l0lab") / "fixtures" / name


def _load(name):
    return json.loads(fixture_path(name).read_text())


def noisy_recovery_instance():
    """4x5 integer matrix with a noisy right-hand side; the clean signal is 2-sparse."""
    return Instance.from_dict(_load("noisy_recovery_4x5.json"))


def noisy_recovery_truth():
    """``(x_true, sigma)`` that generated :func:`noisy_recovery_instance`."""
    d = _load("noisy_recovery_4x5.json")
    return d["x_true"], d["sigma"]


def synthetic_levels(phi=None):
    """Five hand-made levels whose envelope skips one line entirely."""
    d = _load("synthetic_levels.json")
    return LevelSequence.from_values(d["s"], d["rho"], phi)
