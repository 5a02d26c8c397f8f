"""Condition scoring, effort coefficient, and person-day ranges."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

MAX_SCORE = 3.0


class Condition(Enum):
    INTERFACE = "interface"
    SYNTAX = "syntax"
    PERFORMANCE = "performance"
    CODE_QUALITY = "code_quality"
    SUPPORT = "support"


CONDITIONS: tuple[Condition, ...] = tuple(Condition)


class EfMode(Enum):
    """How the numerator of the effort coefficient is formed.

    ``LITERAL`` weights each score by its priority, which keeps the result in
    [0, 1]. ``LEGACY`` sums the raw scores and divides by the weighted
    maximum; it matches reference figures computed that way but can exceed 1
    when priorities are below 1.
    """

    LITERAL = "literal"
    LEGACY = "legacy"


@functools.total_ordering
class EffortLevel(Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def weight(self) -> int:
        return _LEVEL_WEIGHTS[self]

    def __lt__(self, other: EffortLevel) -> bool:
        if not isinstance(other, EffortLevel):
            return NotImplemented
        return self.weight < other.weight


_LEVEL_WEIGHTS = {EffortLevel.LOW: 1, EffortLevel.MEDIUM: 2, EffortLevel.HIGH: 3}


class DegeneratePriorityError(ValueError):
    pass


def _per_condition(values: Mapping, what: str, lo: float, hi: float) -> dict[Condition, float]:
    out: dict[Condition, float] = {}
    for key, value in values.items():
        cond = key if isinstance(key, Condition) else Condition(key)
        if cond in out:
            raise ValueError(f"duplicate {what} for {cond.value}")
        value = float(value)
        if math.isnan(value) or not lo <= value <= hi:
            raise ValueError(f"{what} out of [{lo:g},{hi:g}] for {cond.value}: {value}")
        out[cond] = value
    missing = [c.value for c in CONDITIONS if c not in out]
    if missing:
        raise ValueError(f"missing {what} for: {', '.join(missing)}")
    return out


@dataclass(frozen=True)
class ConditionScores:
    """Effort score per condition: 0 satisfied, 1 low, 2 medium, 3 high.

    Fractional scores are allowed.
    """

    values: Mapping[Condition, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _per_condition(self.values, "score", 0.0, MAX_SCORE))

    @classmethod
    def of(cls, *scores: float) -> ConditionScores:
        if len(scores) != len(CONDITIONS):
            raise ValueError(f"expected {len(CONDITIONS)} scores, got {len(scores)}")
        return cls(dict(zip(CONDITIONS, scores)))

    def __getitem__(self, cond: Condition) -> float:
        return self.values[cond]

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.values[c] for c in CONDITIONS)


@dataclass(frozen=True)
class PriorityProfile:
    values: Mapping[Condition, float]

    def __post_init__(self) -> None:
        values = _per_condition(self.values, "priority", 0.0, 1.0)
        if not any(v > 0 for v in values.values()):
            raise DegeneratePriorityError("degenerate priority profile: all priorities are zero")
        object.__setattr__(self, "values", values)

    @classmethod
    def of(cls, *priorities: float) -> PriorityProfile:
        if len(priorities) != len(CONDITIONS):
            raise ValueError(f"expected {len(CONDITIONS)} priorities, got {len(priorities)}")
        return cls(dict(zip(CONDITIONS, priorities)))

    def __getitem__(self, cond: Condition) -> float:
        return self.values[cond]

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.values[c] for c in CONDITIONS)


# Interface and Syntax matter most while a system is still a research baseline.
DEFAULT_PRIORITIES = PriorityProfile.of(1.0, 1.0, 0.5, 0.5, 0.5)


@dataclass(frozen=True)
class EffortCoefficient:
    value: float
    mode: EfMode
    c_total: float
    c_max: float
    overridden: bool = False

    @classmethod
    def override(cls, value: float, mode: EfMode = EfMode.LITERAL) -> EffortCoefficient:
        """A user-supplied coefficient that bypasses the scoring step."""
        value = float(value)
        if math.isnan(value) or value < 0:
            raise ValueError(f"effort coefficient must be >= 0, got {value}")
        return cls(value=value, mode=mode, c_total=value, c_max=1.0, overridden=True)

    @property
    def exceeds_unit(self) -> bool:
        return self.value > 1.0


def compute_effort_coefficient(
    scores: ConditionScores,
    priorities: PriorityProfile = DEFAULT_PRIORITIES,
    mode: EfMode = EfMode.LITERAL,
) -> EffortCoefficient:
    c_max = math.fsum(priorities[c] * MAX_SCORE for c in CONDITIONS)
    if c_max <= 0:
        raise DegeneratePriorityError("degenerate priority profile: all priorities are zero")
    if mode is EfMode.LITERAL:
        c_total = math.fsum(priorities[c] * scores[c] for c in CONDITIONS)
    else:
        c_total = math.fsum(scores[c] for c in CONDITIONS)
    return EffortCoefficient(value=c_total / c_max, mode=mode, c_total=c_total, c_max=c_max)


def predict_low_level_time(ef: EffortCoefficient | float) -> int:
    """Point estimate in person-days: ten times the coefficient, rounded half up."""
    value = ef.value if isinstance(ef, EffortCoefficient) else float(ef)
    if value < 0:
        raise ValueError(f"effort coefficient must be >= 0, got {value}")
    # half up, not banker's; epsilon absorbs 10*x landing just below .5
    return int(math.floor(10.0 * value + 0.5 + 1e-9))


@dataclass(frozen=True)
class TimeRange:
    """Person-day interval.

    A bounded range is the closed interval ``[min_days, max_days]``. When
    ``max_days`` is None the range is open below and unbounded above, i.e.
    ``(min_days, inf)``, and renders as ``>N``.
    """

    min_days: float
    max_days: Optional[float] = None

    def __post_init__(self) -> None:
        if self.min_days < 0:
            raise ValueError(f"min_days must be >= 0, got {self.min_days}")
        if self.max_days is not None and self.max_days < self.min_days:
            raise ValueError(f"max_days {self.max_days} < min_days {self.min_days}")

    @classmethod
    def closed(cls, lo: float, hi: float) -> TimeRange:
        return cls(lo, hi)

    @classmethod
    def above(cls, lo: float) -> TimeRange:
        return cls(lo, None)

    @property
    def bounded(self) -> bool:
        return self.max_days is not None

    def __add__(self, other: TimeRange) -> TimeRange:
        return add_time_ranges(self, other)

    def shift(self, days: int) -> TimeRange:
        return shift_time_range(self, days)

    def contains(self, days: float, slack: float = 0.0) -> bool:
        if self.max_days is None:
            return days > self.min_days - slack
        return self.min_days - slack <= days <= self.max_days + slack

    def midpoint(self, unbounded_margin: float = 3.0) -> float:
        if self.max_days is None:
            return self.min_days + unbounded_margin
        return (self.min_days + self.max_days) / 2

    def __str__(self) -> str:
        if self.max_days is None:
            return f">{_fmt_days(self.min_days)}"
        return f"{_fmt_days(self.min_days)}-{_fmt_days(self.max_days)}"

    def to_dict(self) -> dict:
        return {"min_days": self.min_days, "max_days": self.max_days}

    @classmethod
    def from_dict(cls, data: Mapping) -> TimeRange:
        return cls(data["min_days"], data.get("max_days"))


def _fmt_days(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


_LEVEL_RANGES = {
    EffortLevel.LOW: TimeRange.closed(0, 2),
    EffortLevel.MEDIUM: TimeRange.closed(3, 6),
    EffortLevel.HIGH: TimeRange.above(6),
}


def effort_level_to_range(level: EffortLevel) -> TimeRange:
    return _LEVEL_RANGES[level]


def add_time_ranges(a: TimeRange, b: TimeRange) -> TimeRange:
    lo = a.min_days + b.min_days
    if a.max_days is None or b.max_days is None:
        return TimeRange.above(lo)
    return TimeRange.closed(lo, a.max_days + b.max_days)


def shift_time_range(r: TimeRange, days: int) -> TimeRange:
    if days < 0:
        raise ValueError(f"shift must be >= 0 days, got {days}")
    if r.max_days is None:
        return TimeRange.above(r.min_days + days)
    return TimeRange.closed(r.min_days + days, r.max_days + days)
