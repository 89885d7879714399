"""Shared fixtures and the acceptance-summary reporter."""

import numpy as np
import pytest

from levy_occupation.models import ExponentialJumps, LevyModel

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_RESULTS = {}


def record_criterion(number: int, label: str, passed: bool, detail: str = ""):
    ACCEPTANCE_RESULTS[number] = (label, passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        label, passed, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        tr.write_line(f"criterion {number} {label}: {status}{suffix}")


@pytest.fixture
def bm():
    return LevyModel(sigma=1.0, drift=0.0)


@pytest.fixture
def jd():
    return LevyModel(sigma=1.0, drift=1.0,
                     jumps=ExponentialJumps(rate=1.0, alpha=2.0))


@pytest.fixture
def cl():
    # bounded variation: positive unit-drift premium flow minus claims
    return LevyModel(sigma=0.0, drift=1.5,
                     jumps=ExponentialJumps(rate=1.0, alpha=2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
