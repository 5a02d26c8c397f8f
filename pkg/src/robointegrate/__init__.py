"""Integration effort assessment and pick-and-place benchmark metrics."""

from importlib import resources
from pathlib import Path

from .decision import (
    Approach,
    ApproachAssessment,
    ComponentEntry,
    ComponentPlan,
    HighLevelDecision,
    LowLevelApproach,
    LowLevelDecision,
    LowLevelThresholds,
    plan_component,
    recommend_high_level,
    recommend_low_level,
)
from .effort import (
    DEFAULT_PRIORITIES,
    Condition,
    ConditionScores,
    EffortCoefficient,
    EffortLevel,
    EfMode,
    PriorityProfile,
    TimeRange,
    add_time_ranges,
    compute_effort_coefficient,
    effort_level_to_range,
    predict_low_level_time,
    shift_time_range,
)
from .manifest import SystemManifest, load_actuals, load_manifest
from .metrics import (
    AttemptRecord,
    BenchmarkConfig,
    Estimator,
    Outcome,
    TrialRecord,
    TrialTally,
    compute_completion_score,
    compute_mpph,
    compute_success_metrics,
    tally_failures,
    tally_trials,
    validate_trial_log,
)
from .report import calibrate, emit_plan_report
from .simulator import PairParams, SimConfig, analytic_expectations, simulate_trials

__version__ = "0.1.0"

__all__ = [
    "Approach",
    "ApproachAssessment",
    "AttemptRecord",
    "BenchmarkConfig",
    "ComponentEntry",
    "ComponentPlan",
    "Condition",
    "ConditionScores",
    "DEFAULT_PRIORITIES",
    "EfMode",
    "EffortCoefficient",
    "EffortLevel",
    "Estimator",
    "HighLevelDecision",
    "LowLevelApproach",
    "LowLevelDecision",
    "LowLevelThresholds",
    "Outcome",
    "PairParams",
    "PriorityProfile",
    "SimConfig",
    "SystemManifest",
    "TimeRange",
    "TrialRecord",
    "TrialTally",
    "add_time_ranges",
    "analytic_expectations",
    "calibrate",
    "compute_completion_score",
    "compute_effort_coefficient",
    "compute_mpph",
    "compute_success_metrics",
    "effort_level_to_range",
    "emit_plan_report",
    "load_actuals",
    "load_manifest",
    "plan_component",
    "predict_low_level_time",
    "recommend_high_level",
    "recommend_low_level",
    "shift_time_range",
    "simulate_trials",
    "tally_failures",
    "tally_trials",
    "validate_trial_log",
    "fixture_path",
]


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture, e.g. ``fixture_path("dual_arm.json")``."""
    return Path(str(resources.files(__package__) / "fixtures" / name))
