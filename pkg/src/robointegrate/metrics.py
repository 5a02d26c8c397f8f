"""Pick-and-place benchmark metrics computed from trial logs.

Per trial ``i`` and (hand, tool) slot the log reduces to three counts: ``n_s``
(1 if the tool ended in the toolbox), ``n_a`` (pick-and-place attempts) and
``n_u`` (1 if the tool was left on the bench). From these:

* precision  P = n_s / n_a
* attempt rate A = n_a / (n_a + n_u)
* success rate R = n_s / (n_a + n_u)

aggregated over trials by one of three estimators, plus the task completion
score (successes per trial) and picks per hour.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence


class Outcome(Enum):
    SUCCESS = "success"
    VISUAL_DETECTION_FAILURE = "visual_detection_failure"
    GRASPING_FAILURE = "grasping_failure"
    PLACEMENT_FAILURE = "placement_failure"


FAILURE_TYPES: tuple[Outcome, ...] = tuple(o for o in Outcome if o is not Outcome.SUCCESS)


class Estimator(Enum):
    LITERAL_SUM = "literal-sum"
    MEAN_OF_RATIOS = "mean-of-ratios"
    POOLED = "pooled"


@dataclass(frozen=True)
class BenchmarkConfig:
    hands: tuple[str, ...]
    tools: tuple[str, ...]
    instances_per_tool_per_hand: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "hands", tuple(self.hands))
        object.__setattr__(self, "tools", tuple(self.tools))
        if not self.hands or not self.tools:
            raise ValueError("benchmark needs at least one hand and one tool")
        if len(set(self.hands)) != len(self.hands) or len(set(self.tools)) != len(self.tools):
            raise ValueError("duplicate hand or tool identifiers")
        if self.instances_per_tool_per_hand < 1:
            raise ValueError("instances_per_tool_per_hand must be >= 1")

    @property
    def max_completion_score(self) -> int:
        return len(self.hands) * len(self.tools) * self.instances_per_tool_per_hand

    def pairs(self) -> list[tuple[str, str]]:
        return [(h, t) for h in self.hands for t in self.tools]

    def slots(self) -> list[tuple[str, str, int]]:
        return [
            (h, t, k)
            for h in self.hands
            for t in self.tools
            for k in range(1, self.instances_per_tool_per_hand + 1)
        ]


@dataclass(frozen=True)
class AttemptRecord:
    trial_id: int
    hand: str
    tool: str
    attempt_index: int
    outcome: Outcome
    instance: int = 1


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    duration_seconds: float
    # (hand, tool, instance) triples; a tool dropped out of the workspace is not listed
    remaining_on_bench: frozenset[tuple[str, str, int]] = frozenset()

    def __post_init__(self) -> None:
        norm = set()
        for item in self.remaining_on_bench:
            item = tuple(item)
            norm.add(item if len(item) == 3 else (item[0], item[1], 1))
        object.__setattr__(self, "remaining_on_bench", frozenset(norm))


class SlotKey(NamedTuple):
    trial_id: int
    hand: str
    tool: str
    instance: int = 1


@dataclass(frozen=True)
class TrialTally:
    n_s: int
    n_a: int
    n_u: int


class InvalidLogError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        head = "; ".join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid trial log: {head}{more}")


def validate_trial_log(
    attempts: Sequence[AttemptRecord],
    trials: Sequence[TrialRecord],
    config: BenchmarkConfig,
) -> list[str]:
    """Return every invariant violation found in the log. Empty means valid."""
    problems: list[str] = []
    hands, tools = set(config.hands), set(config.tools)
    n_inst = config.instances_per_tool_per_hand

    trial_ids: set[int] = set()
    for tr in trials:
        if tr.trial_id < 1:
            problems.append(f"trial {tr.trial_id}: trial_id must be >= 1")
        if tr.trial_id in trial_ids:
            problems.append(f"trial {tr.trial_id}: duplicate trial record")
        trial_ids.add(tr.trial_id)
        d = tr.duration_seconds
        if d is None or not math.isfinite(d) or d <= 0:
            problems.append(f"trial {tr.trial_id}: duration_seconds must be > 0, got {d}")
        for h, t, k in sorted(tr.remaining_on_bench):
            if h not in hands or t not in tools or not 1 <= k <= n_inst:
                problems.append(f"trial {tr.trial_id}: remaining ({h}, {t}, {k}) not in hands x tools")

    by_slot: dict[SlotKey, list[AttemptRecord]] = defaultdict(list)
    for a in attempts:
        where = f"trial {a.trial_id} ({a.hand}, {a.tool}) attempt {a.attempt_index}"
        if a.hand not in hands:
            problems.append(f"{where}: unknown hand {a.hand!r}")
        if a.tool not in tools:
            problems.append(f"{where}: unknown tool {a.tool!r}")
        if not 1 <= a.instance <= n_inst:
            problems.append(f"{where}: instance {a.instance} outside 1..{n_inst}")
        if a.attempt_index < 1:
            problems.append(f"{where}: attempt_index must be >= 1")
        if a.trial_id not in trial_ids:
            problems.append(f"{where}: no trial record for trial {a.trial_id}")
        by_slot[SlotKey(a.trial_id, a.hand, a.tool, a.instance)].append(a)

    remaining = {(tr.trial_id, *slot) for tr in trials for slot in tr.remaining_on_bench}
    for key in sorted(by_slot):
        recs = sorted(by_slot[key], key=lambda r: r.attempt_index)
        where = f"trial {key.trial_id} ({key.hand}, {key.tool})"
        indices = [r.attempt_index for r in recs]
        if indices != list(range(1, len(recs) + 1)):
            problems.append(f"{where}: attempt indices {indices} not consecutive from 1")
        successes = [i for i, r in enumerate(recs) if r.outcome is Outcome.SUCCESS]
        if successes and successes[0] != len(recs) - 1:
            problems.append(f"{where}: attempt after success")
        if successes and tuple(key) in remaining:
            problems.append(f"{where}: n_s + n_u <= 1 violated (tool both placed and left on bench)")
    return problems


def tally_trials(
    attempts: Sequence[AttemptRecord],
    trials: Sequence[TrialRecord],
    config: BenchmarkConfig,
) -> dict[SlotKey, TrialTally]:
    """Reduce a valid log to per-(trial, hand, tool) counts.

    Slots with no attempts that are not on the bench at the end of the trial
    tally to (0, 0, 0): the tool left the workspace or was never present.
    """
    problems = validate_trial_log(attempts, trials, config)
    if problems:
        raise InvalidLogError(problems)

    n_a: Counter[SlotKey] = Counter()
    placed: set[SlotKey] = set()
    for a in attempts:
        key = SlotKey(a.trial_id, a.hand, a.tool, a.instance)
        n_a[key] += 1
        if a.outcome is Outcome.SUCCESS:
            placed.add(key)

    out: dict[SlotKey, TrialTally] = {}
    for tr in sorted(trials, key=lambda r: r.trial_id):
        for h, t, k in config.slots():
            key = SlotKey(tr.trial_id, h, t, k)
            out[key] = TrialTally(
                n_s=int(key in placed),
                n_a=n_a[key],
                n_u=int((h, t, k) in tr.remaining_on_bench),
            )
    return out


@dataclass(frozen=True)
class PairMetrics:
    """P, A, R for one (hand, tool); None where undefined (every denominator zero)."""

    precision: Optional[float]
    attempt_rate: Optional[float]
    success_rate: Optional[float]
    observations: int
    precision_skipped: int
    rate_skipped: int


@dataclass(frozen=True)
class SuccessMetrics:
    estimator: Estimator
    pairs: Mapping[tuple[str, str], PairMetrics]
    flags: tuple[str, ...] = field(default=())

    def __getitem__(self, pair: tuple[str, str]) -> PairMetrics:
        return self.pairs[pair]


def _aggregate(ratios: list[tuple[int, int]], estimator: Estimator) -> tuple[Optional[float], int]:
    """Aggregate (numerator, denominator) pairs; returns (value, skipped)."""
    kept = [(n, d) for n, d in ratios if d > 0]
    skipped = len(ratios) - len(kept)
    if estimator is Estimator.POOLED:
        den = sum(d for _, d in kept)
        return (float(Fraction(sum(n for n, _ in kept), den)) if den else None), skipped
    if not kept:
        return None, skipped
    total = sum((Fraction(n, d) for n, d in kept), Fraction(0))
    if estimator is Estimator.LITERAL_SUM:
        return float(total), skipped
    return float(total / len(kept)), skipped


def compute_success_metrics(
    tallies: Mapping[SlotKey, TrialTally],
    config: BenchmarkConfig,
    estimator: Estimator = Estimator.MEAN_OF_RATIOS,
) -> SuccessMetrics:
    per_pair: dict[tuple[str, str], list[TrialTally]] = defaultdict(list)
    for key in sorted(tallies):
        per_pair[(key.hand, key.tool)].append(tallies[key])

    pairs: dict[tuple[str, str], PairMetrics] = {}
    flags: list[str] = []
    for pair in config.pairs():
        obs = per_pair.get(pair, [])
        p, p_skip = _aggregate([(x.n_s, x.n_a) for x in obs], estimator)
        a, r_skip = _aggregate([(x.n_a, x.n_a + x.n_u) for x in obs], estimator)
        r, _ = _aggregate([(x.n_s, x.n_a + x.n_u) for x in obs], estimator)
        if p is None:
            flags.append(f"{pair[0]}/{pair[1]}: precision undefined (no attempts)")
        if a is None:
            flags.append(f"{pair[0]}/{pair[1]}: attempt and success rates undefined (no attempts, nothing left)")
        pairs[pair] = PairMetrics(
            precision=p,
            attempt_rate=a,
            success_rate=r,
            observations=len(obs),
            precision_skipped=p_skip,
            rate_skipped=r_skip,
        )
    return SuccessMetrics(estimator=estimator, pairs=pairs, flags=tuple(flags))


@dataclass(frozen=True)
class MeanStdev:
    mean: float
    stdev: float
    per_trial: tuple[float, ...] = ()


@dataclass(frozen=True)
class OverallMetrics:
    completion_score_mean: float
    completion_score_stdev: float
    mpph_mean: float
    mpph_stdev: float


def _mean_stdev(values: Sequence[float]) -> MeanStdev:
    mean = statistics.fmean(values)
    stdev = statistics.stdev(values) if len(values) > 1 else 0.0
    return MeanStdev(mean, stdev, tuple(values))


def _successes_per_trial(tallies: Mapping[SlotKey, TrialTally]) -> dict[int, int]:
    per_trial: dict[int, int] = defaultdict(int)
    for key, tally in tallies.items():
        per_trial[key.trial_id] += tally.n_s
    return dict(sorted(per_trial.items()))


def compute_completion_score(
    tallies: Mapping[SlotKey, TrialTally], config: Optional[BenchmarkConfig] = None
) -> MeanStdev:
    """Mean and sample stdev of the number of tools placed per trial."""
    per_trial = _successes_per_trial(tallies)
    if not per_trial:
        raise ValueError("completion score needs at least one trial")
    result = _mean_stdev([float(v) for v in per_trial.values()])
    if config is not None and result.mean > config.max_completion_score:
        raise ValueError("completion score exceeds the configured maximum")
    return result


def compute_mpph(
    tallies: Mapping[SlotKey, TrialTally], trials: Iterable[TrialRecord]
) -> MeanStdev:
    """Picks per hour per trial (3600 * successes / duration), then mean and sample stdev."""
    per_trial = _successes_per_trial(tallies)
    rates = []
    for tr in sorted(trials, key=lambda r: r.trial_id):
        d = tr.duration_seconds
        if d is None or not math.isfinite(d) or d <= 0:
            raise ValueError(f"trial {tr.trial_id}: missing or non-positive duration")
        rates.append(3600.0 * per_trial.get(tr.trial_id, 0) / d)
    if not rates:
        raise ValueError("MPPH needs at least one trial")
    return _mean_stdev(rates)


def compute_overall(
    tallies: Mapping[SlotKey, TrialTally], trials: Iterable[TrialRecord], config: BenchmarkConfig
) -> OverallMetrics:
    s = compute_completion_score(tallies, config)
    m = compute_mpph(tallies, trials)
    return OverallMetrics(s.mean, s.stdev, m.mean, m.stdev)


@dataclass(frozen=True)
class FailureTally:
    counts: Mapping[tuple[str, str, Outcome], int]

    def get(self, hand: str, tool: str, kind: Outcome) -> int:
        return self.counts.get((hand, tool, kind), 0)

    def total(self, hand: str, tool: str) -> int:
        return sum(self.get(hand, tool, kind) for kind in FAILURE_TYPES)


def tally_failures(attempts: Iterable[AttemptRecord], config: BenchmarkConfig) -> FailureTally:
    counts = {(h, t, kind): 0 for h, t in config.pairs() for kind in FAILURE_TYPES}
    for a in attempts:
        if a.outcome is not Outcome.SUCCESS:
            key = (a.hand, a.tool, a.outcome)
            counts[key] = counts.get(key, 0) + 1
    return FailureTally(counts)
