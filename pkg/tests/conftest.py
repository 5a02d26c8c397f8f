from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from robointegrate import fixture_path
from robointegrate.metrics import AttemptRecord, BenchmarkConfig, Outcome, TrialRecord

settings.register_profile(
    "thorough",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("quick", max_examples=100, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "thorough"))

HANDS = ("qb_hand", "armar6_hand")
TOOLS = ("torch", "cutter", "brush", "screwdriver")


@pytest.fixture
def dual_arm_path():
    return fixture_path("dual_arm.json")


@pytest.fixture
def actuals_path():
    return fixture_path("dual_arm_actuals.csv")


@pytest.fixture
def bench_config():
    return BenchmarkConfig(HANDS, TOOLS)


def log_from_tallies(tallies, hand="h", tool="t", duration=600.0):
    """Build a log for one (hand, tool) from a list of (n_s, n_a, n_u) per trial.

    Failed attempts are recorded as grasping failures; the last attempt is the
    success when n_s == 1.
    """
    attempts, trials = [], []
    for i, (n_s, n_a, n_u) in enumerate(tallies, start=1):
        for k in range(1, n_a + 1):
            outcome = Outcome.SUCCESS if (n_s and k == n_a) else Outcome.GRASPING_FAILURE
            attempts.append(AttemptRecord(i, hand, tool, k, outcome))
        remaining = frozenset({(hand, tool, 1)}) if n_u else frozenset()
        trials.append(TrialRecord(i, duration, remaining))
    return attempts, trials, BenchmarkConfig((hand,), (tool,))


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_acceptance(label: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((label, ok, detail))
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
