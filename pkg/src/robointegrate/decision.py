"""High-level (native vs. container) and low-level (direct/augment/reimplement) choices."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .effort import (
    DEFAULT_PRIORITIES,
    ConditionScores,
    EffortCoefficient,
    EffortLevel,
    EfMode,
    PriorityProfile,
    TimeRange,
    compute_effort_coefficient,
    effort_level_to_range,
    predict_low_level_time,
)


class Approach(Enum):
    NATIVE_INCLUSION = "native"
    CONTAINERISATION = "container"


class LowLevelApproach(Enum):
    DIRECT_INTEGRATION = "direct"
    AUGMENTATION = "augmentation"
    RE_IMPLEMENTATION = "reimplementation"


_LOW_LEVEL_ORDER = {
    LowLevelApproach.DIRECT_INTEGRATION: 0,
    LowLevelApproach.AUGMENTATION: 1,
    LowLevelApproach.RE_IMPLEMENTATION: 2,
}


def low_level_rank(approach: LowLevelApproach) -> int:
    return _LOW_LEVEL_ORDER[approach]


@dataclass(frozen=True)
class ApproachAssessment:
    """Effort and impact labels for one high-level approach.

    For native inclusion ``effort`` is the conflict-resolution effort; for
    containerisation it is the blueprint-creation effort.
    """

    approach: Approach
    effort: EffortLevel
    impact: EffortLevel

    @property
    def score(self) -> int:
        return self.effort.weight + self.impact.weight

    @property
    def predicted_time(self) -> TimeRange:
        return effort_level_to_range(self.effort) + effort_level_to_range(self.impact)


@dataclass(frozen=True)
class HighLevelDecision:
    chosen: Approach
    native_score: int
    container_score: int
    predicted_time: TimeRange
    rationale: str
    overridden: bool = False


@dataclass(frozen=True)
class LowLevelThresholds:
    direct_below: float = 0.15
    reimplement_at_or_above: float = 0.55

    def __post_init__(self) -> None:
        if not 0 < self.direct_below < self.reimplement_at_or_above <= 1:
            raise ValueError(
                "thresholds must satisfy 0 < direct_below < reimplement_at_or_above <= 1, "
                f"got {self.direct_below}, {self.reimplement_at_or_above}"
            )


@dataclass(frozen=True)
class LowLevelDecision:
    chosen: LowLevelApproach
    ef: EffortCoefficient
    overridden: bool
    rationale: str


@dataclass(frozen=True)
class ComponentEntry:
    """One component as described in a system manifest."""

    name: str
    scores: ConditionScores
    native: ApproachAssessment
    container: ApproachAssessment
    ef_override: Optional[float] = None
    high_level_override: Optional[Approach] = None
    low_level_override: Optional[LowLevelApproach] = None
    reference_ef: Optional[float] = None
    notes: str = ""


@dataclass(frozen=True)
class ComponentPlan:
    name: str
    high: HighLevelDecision
    low: LowLevelDecision
    low_level_days: int
    total_time: TimeRange
    warnings: tuple[str, ...] = field(default=())


def recommend_high_level(
    native: ApproachAssessment, container: ApproachAssessment
) -> HighLevelDecision:
    """Pick the approach with the smaller effort+impact score.

    Ties go to the lower impact, then to native inclusion.
    """
    if {native.approach, container.approach} != set(Approach):
        raise ValueError("expected one native and one container assessment")
    if native.approach is not Approach.NATIVE_INCLUSION:
        native, container = container, native

    ns, cs = native.score, container.score
    if ns != cs:
        chosen = native if ns < cs else container
        why = f"native score {ns} vs container score {cs} (effort+impact, Low=1 Medium=2 High=3)"
    elif native.impact != container.impact:
        chosen = native if native.impact < container.impact else container
        why = f"scores tied at {ns}; tie broken by lower impact"
    else:
        chosen = native
        why = f"scores and impacts tied at {ns}; tie broken in favour of native inclusion"

    return HighLevelDecision(
        chosen=chosen.approach,
        native_score=ns,
        container_score=cs,
        predicted_time=chosen.predicted_time,
        rationale=why,
    )


def classify_ef(value: float, thresholds: LowLevelThresholds = LowLevelThresholds()) -> LowLevelApproach:
    if value < thresholds.direct_below:
        return LowLevelApproach.DIRECT_INTEGRATION
    if value >= thresholds.reimplement_at_or_above:
        return LowLevelApproach.RE_IMPLEMENTATION
    return LowLevelApproach.AUGMENTATION


def recommend_low_level(
    ef: EffortCoefficient,
    thresholds: LowLevelThresholds = LowLevelThresholds(),
    override: Optional[LowLevelApproach] = None,
) -> LowLevelDecision:
    if ef.value < 0:
        raise ValueError(f"effort coefficient must be >= 0, got {ef.value}")
    advised = classify_ef(ef.value, thresholds)
    why = (
        f"e_f={ef.value:.3f} ({ef.mode.value}); direct below {thresholds.direct_below:g}, "
        f"re-implementation at or above {thresholds.reimplement_at_or_above:g} -> {advised.value}"
    )
    if override is not None and override is not advised:
        why += f"; overridden to {override.value}"
        return LowLevelDecision(chosen=override, ef=ef, overridden=True, rationale=why)
    return LowLevelDecision(chosen=advised, ef=ef, overridden=False, rationale=why)


def plan_component(
    entry: ComponentEntry,
    priorities: PriorityProfile = DEFAULT_PRIORITIES,
    mode: EfMode = EfMode.LITERAL,
    thresholds: LowLevelThresholds = LowLevelThresholds(),
    reference_tolerance: float = 1e-3,
) -> ComponentPlan:
    warnings: list[str] = []

    high = recommend_high_level(entry.native, entry.container)
    if entry.high_level_override is not None and entry.high_level_override is not high.chosen:
        forced = entry.native if entry.high_level_override is Approach.NATIVE_INCLUSION else entry.container
        high = HighLevelDecision(
            chosen=forced.approach,
            native_score=high.native_score,
            container_score=high.container_score,
            predicted_time=forced.predicted_time,
            rationale=high.rationale + f"; overridden to {forced.approach.value}",
            overridden=True,
        )

    computed = compute_effort_coefficient(entry.scores, priorities, mode)
    if entry.ef_override is not None:
        ef = EffortCoefficient.override(entry.ef_override, mode)
        warnings.append(
            f"e_f override {ef.value:.3f} used in place of computed {computed.value:.3f} ({mode.value})"
        )
    else:
        ef = computed
        if ef.exceeds_unit:
            warnings.append(f"e_f {ef.value:.3f} exceeds 1 in {mode.value} mode; reported unclamped")
        if entry.reference_ef is not None and abs(ef.value - entry.reference_ef) > reference_tolerance:
            needed = entry.reference_ef * ef.c_max
            warnings.append(
                f"computed e_f {ef.value:.3f} ({mode.value}) differs from reference "
                f"{entry.reference_ef:.3f}: numerator is {ef.c_total:g}, reference implies "
                f"{needed:.2f} ({needed - ef.c_total:+.2f})"
            )

    low = recommend_low_level(ef, thresholds, entry.low_level_override)
    if entry.ef_override is not None:
        low = LowLevelDecision(
            chosen=low.chosen, ef=ef, overridden=low.overridden,
            rationale=low.rationale + " [e_f overridden]",
        )
    days = predict_low_level_time(ef)
    return ComponentPlan(
        name=entry.name,
        high=high,
        low=low,
        low_level_days=days,
        total_time=high.predicted_time.shift(days),
        warnings=tuple(warnings),
    )
