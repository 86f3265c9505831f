import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from l0lab import Instance  # noqa: E402
from l0lab.datasets import noisy_recovery_instance, synthetic_levels  # noqa: E402

ENSEMBLE_SEED = 20240611
ENSEMBLE_SIZE = 100


def make_ensemble(seed=ENSEMBLE_SEED, size=ENSEMBLE_SIZE):
    """Small integer instances, m <= 5, n <= 7, entries in -5..5; p alternates 2, 1."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(size):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 8))
        A = rng.integers(-5, 6, size=(m, n)).astype(float)
        b = rng.integers(-5, 6, size=m).astype(float)
        if not b.any():
            b[0] = 1.0
        out.append(Instance(A, b, p=2 if i % 2 == 0 else 1))
    return out


ENSEMBLE = make_ensemble()


@pytest.fixture(scope="session")
def ensemble():
    return ENSEMBLE


@pytest.fixture
def bundled():
    return noisy_recovery_instance()


@pytest.fixture
def synthetic():
    return synthetic_levels()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
