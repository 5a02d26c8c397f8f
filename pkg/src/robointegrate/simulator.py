"""Seeded synthetic trial logs with closed-form expected metrics.

Each (hand, tool, instance) slot follows the same small generative model:
the tool is detected with ``p_detect`` (otherwise it stays on the bench with
no attempts). A detected tool gets up to ``max_attempts`` attempts; an attempt
fails in grasping with ``1 - p_grasp``, otherwise fails in placement with
``1 - p_place``. After a placement failure the tool leaves the workspace with
``p_drop``. A tool that is neither placed nor dropped when attempts run out is
left on the bench.

Randomness for trial ``i`` comes only from ``(seed, i)``, so trials can be
generated in any order or in parallel with identical output.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .metrics import AttemptRecord, BenchmarkConfig, Outcome, TrialRecord


@dataclass(frozen=True)
class PairParams:
    p_detect: float = 1.0
    p_grasp: float = 1.0
    p_place: float = 1.0
    p_drop: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_detect", "p_grasp", "p_place", "p_drop"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0,1], got {v!r}")


@dataclass(frozen=True)
class SimConfig:
    benchmark: BenchmarkConfig
    params: Mapping[tuple[str, str], PairParams]
    max_attempts: int = 1
    base_seconds: float = 60.0
    seconds_per_attempt: float = 30.0

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.base_seconds <= 0 or not math.isfinite(self.base_seconds):
            raise ValueError("base_seconds must be > 0 so every trial has a positive duration")
        if self.seconds_per_attempt < 0 or not math.isfinite(self.seconds_per_attempt):
            raise ValueError("seconds_per_attempt must be >= 0")
        missing = [p for p in self.benchmark.pairs() if p not in self.params]
        if missing:
            raise ValueError(f"no parameters for pairs: {missing}")
        extra = [p for p in self.params if p not in set(self.benchmark.pairs())]
        if extra:
            raise ValueError(f"parameters for unknown pairs: {extra}")

    @classmethod
    def uniform(
        cls, benchmark: BenchmarkConfig, params: PairParams, **kwargs
    ) -> SimConfig:
        return cls(benchmark, {p: params for p in benchmark.pairs()}, **kwargs)


@dataclass(frozen=True)
class SimulatedLog:
    config: SimConfig
    seed: int
    attempts: tuple[AttemptRecord, ...]
    trials: tuple[TrialRecord, ...]
    # ground truth: failures injected per (hand, tool, outcome)
    injected_failures: Mapping[tuple[str, str, Outcome], int] = field(default_factory=dict)


def _trial_rng(seed: int, trial_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial_id]))


def _simulate_one(config: SimConfig, seed: int, trial_id: int):
    rng = _trial_rng(seed, trial_id)
    slots = config.benchmark.slots()
    # upper bound on draws: detection + 3 per attempt
    draws = rng.random(len(slots) * (1 + 3 * config.max_attempts))
    pos = 0
    attempts: list[AttemptRecord] = []
    remaining: set[tuple[str, str, int]] = set()

    for hand, tool, inst in slots:
        p = config.params[(hand, tool)]
        detected = draws[pos] < p.p_detect
        pos += 1
        if not detected:
            remaining.add((hand, tool, inst))
            continue
        left_on_bench = True
        for k in range(1, config.max_attempts + 1):
            if draws[pos] >= p.p_grasp:
                pos += 1
                outcome = Outcome.GRASPING_FAILURE
            else:
                pos += 1
                if draws[pos] >= p.p_place:
                    pos += 1
                    outcome = Outcome.PLACEMENT_FAILURE
                else:
                    pos += 1
                    outcome = Outcome.SUCCESS
            attempts.append(AttemptRecord(trial_id, hand, tool, k, outcome, inst))
            if outcome is Outcome.SUCCESS:
                left_on_bench = False
                break
            if outcome is Outcome.PLACEMENT_FAILURE:
                dropped = draws[pos] < p.p_drop
                pos += 1
                if dropped:
                    left_on_bench = False
                    break
        if left_on_bench:
            remaining.add((hand, tool, inst))

    duration = config.base_seconds + config.seconds_per_attempt * len(attempts)
    return attempts, TrialRecord(trial_id, float(duration), frozenset(remaining))


def simulate_trials(
    config: SimConfig, seed: int, n_trials: int, workers: Optional[int] = None
) -> SimulatedLog:
    """Generate ``n_trials`` trials. Output does not depend on ``workers``."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ids = range(1, n_trials + 1)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _simulate_one(config, seed, i), ids))
    else:
        results = [_simulate_one(config, seed, i) for i in ids]

    attempts = tuple(a for recs, _ in results for a in recs)
    trials = tuple(tr for _, tr in results)
    injected = Counter(
        (a.hand, a.tool, a.outcome) for a in attempts if a.outcome is not Outcome.SUCCESS
    )
    return SimulatedLog(config, seed, attempts, trials, dict(injected))


@dataclass(frozen=True)
class SlotMoments:
    """Expected per-trial counts for one slot."""

    successes: float
    attempts: float
    left_on_bench: float


@dataclass(frozen=True)
class PairExpectation:
    precision: Optional[float]
    attempt_rate: Optional[float]
    success_rate: Optional[float]
    # probability that one instance is placed in a trial
    success_probability: float
    moments: SlotMoments


@dataclass(frozen=True)
class ExpectedMetrics:
    pairs: Mapping[tuple[str, str], PairExpectation]
    completion_mean: float
    completion_variance: float
    attempts_per_trial: float
    duration_seconds: float

    def __getitem__(self, pair: tuple[str, str]) -> PairExpectation:
        return self.pairs[pair]


def slot_moments(p: PairParams, max_attempts: int) -> SlotMoments:
    """Expected n_s, n_a, n_u for one slot, walking the attempt tree level by level."""
    e_s = e_a = 0.0
    e_u = 1.0 - p.p_detect
    reach = p.p_detect
    for k in range(1, max_attempts + 1):
        e_a += reach
        e_s += reach * p.p_grasp * p.p_place
        carry = reach * ((1.0 - p.p_grasp) + p.p_grasp * (1.0 - p.p_place) * (1.0 - p.p_drop))
        if k == max_attempts:
            e_u += carry
        reach = carry
    return SlotMoments(e_s, e_a, e_u)


def analytic_expectations(config: SimConfig) -> ExpectedMetrics:
    """Large-sample limits of the pooled estimators under the generative model.

    Pooled metrics are ratios of sums, so they converge to ratios of expected
    per-slot counts.
    """
    pairs: dict[tuple[str, str], PairExpectation] = {}
    completion_mean = completion_var = attempts = 0.0
    inst = config.benchmark.instances_per_tool_per_hand
    for pair in config.benchmark.pairs():
        m = slot_moments(config.params[pair], config.max_attempts)
        rate_den = m.attempts + m.left_on_bench
        pairs[pair] = PairExpectation(
            precision=m.successes / m.attempts if m.attempts > 0 else None,
            attempt_rate=m.attempts / rate_den if rate_den > 0 else None,
            success_rate=m.successes / rate_den if rate_den > 0 else None,
            success_probability=m.successes,
            moments=m,
        )
        completion_mean += inst * m.successes
        completion_var += inst * m.successes * (1.0 - m.successes)
        attempts += inst * m.attempts
    return ExpectedMetrics(
        pairs=pairs,
        completion_mean=completion_mean,
        completion_variance=completion_var,
        attempts_per_trial=attempts,
        duration_seconds=config.base_seconds + config.seconds_per_attempt * attempts,
    )


def binomial_standard_error(p: float, n: float) -> float:
    if n <= 0:
        return math.inf
    return math.sqrt(p * (1.0 - p) / n)
