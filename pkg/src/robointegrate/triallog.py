"""Line-delimited trial logs and simulator config files.

A trial log has one JSON object per line, tagged by ``kind``::

    {"kind": "config", "schema_version": 1, "hands": [...], "tools": [...]}
    {"kind": "trial", "trial_id": 1, "duration_seconds": 612.0, "remaining_on_bench": [["qb", "brush"]]}
    {"kind": "attempt", "trial_id": 1, "hand": "qb", "tool": "torch", "attempt_index": 1, "outcome": "success"}

The ``config`` line is optional; without it hands and tools are taken from the
records in order of first appearance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, TextIO

from .metrics import AttemptRecord, BenchmarkConfig, Outcome, TrialRecord
from .simulator import PairParams, SimConfig, SimulatedLog

SCHEMA_VERSION = 1


class TrialLogError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations[:5]))


@dataclass(frozen=True)
class TrialLog:
    config: BenchmarkConfig
    attempts: tuple[AttemptRecord, ...]
    trials: tuple[TrialRecord, ...]
    config_inferred: bool = False


def _int(rec: dict, key: str) -> int:
    v = rec.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"{key} must be an integer, got {v!r}")
    return v


def _str(rec: dict, key: str) -> str:
    v = rec.get(key)
    if not isinstance(v, str) or not v:
        raise ValueError(f"{key} must be a non-empty string, got {v!r}")
    return v


def _remaining(raw: Any) -> frozenset:
    if not isinstance(raw, list):
        raise ValueError("remaining_on_bench must be a list")
    out = set()
    for item in raw:
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise ValueError(f"remaining_on_bench entries must be [hand, tool] or [hand, tool, instance], got {item!r}")
        h, t, *k = item
        out.add((str(h), str(t), int(k[0]) if k else 1))
    return frozenset(out)


def parse_trial_log(lines: Iterable[str], config: Optional[BenchmarkConfig] = None) -> TrialLog:
    attempts: list[AttemptRecord] = []
    trials: list[TrialRecord] = []
    errors: list[str] = []
    hands: dict[str, None] = {}
    tools: dict[str, None] = {}

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict):
                raise ValueError("record must be a JSON object")
            kind = rec.get("kind")
            if kind == "attempt":
                a = AttemptRecord(
                    trial_id=_int(rec, "trial_id"),
                    hand=_str(rec, "hand"),
                    tool=_str(rec, "tool"),
                    attempt_index=_int(rec, "attempt_index"),
                    outcome=Outcome(rec.get("outcome")),
                    instance=_int(rec, "instance") if "instance" in rec else 1,
                )
                attempts.append(a)
                hands.setdefault(a.hand)
                tools.setdefault(a.tool)
            elif kind == "trial":
                d = rec.get("duration_seconds")
                if isinstance(d, bool) or not isinstance(d, (int, float)):
                    raise ValueError(f"duration_seconds must be a number, got {d!r}")
                tr = TrialRecord(_int(rec, "trial_id"), float(d), _remaining(rec.get("remaining_on_bench", [])))
                trials.append(tr)
                for h, t, _ in sorted(tr.remaining_on_bench):
                    hands.setdefault(h)
                    tools.setdefault(t)
            elif kind == "config":
                if rec.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
                    raise ValueError(f"unsupported schema_version {rec.get('schema_version')!r}")
                if config is None:
                    config = BenchmarkConfig(
                        tuple(rec["hands"]), tuple(rec["tools"]),
                        int(rec.get("instances_per_tool_per_hand", 1)),
                    )
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except json.JSONDecodeError as exc:
            errors.append(f"line {lineno}: malformed JSON: {exc.msg}")
        except (ValueError, KeyError, TypeError) as exc:
            errors.append(f"line {lineno}: {exc}")

    if errors:
        raise TrialLogError(errors)
    inferred = config is None
    if inferred:
        if not hands or not tools:
            raise TrialLogError(["log has no config record and no hands/tools to infer one from"])
        config = BenchmarkConfig(tuple(hands), tuple(tools))
    return TrialLog(config, tuple(attempts), tuple(trials), inferred)


def load_trial_log(path: str | Path, config: Optional[BenchmarkConfig] = None) -> TrialLog:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            return parse_trial_log(fh, config)
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {path}") from None


def _dumps(rec: dict) -> str:
    return json.dumps(rec, separators=(", ", ": "))


def write_trial_log(
    out: TextIO,
    config: BenchmarkConfig,
    attempts: Iterable[AttemptRecord],
    trials: Iterable[TrialRecord],
) -> None:
    out.write(_dumps({
        "kind": "config",
        "schema_version": SCHEMA_VERSION,
        "hands": list(config.hands),
        "tools": list(config.tools),
        "instances_per_tool_per_hand": config.instances_per_tool_per_hand,
    }) + "\n")
    by_trial: dict[int, list[AttemptRecord]] = {}
    for a in attempts:
        by_trial.setdefault(a.trial_id, []).append(a)
    for tr in sorted(trials, key=lambda r: r.trial_id):
        remaining = [
            [h, t] if k == 1 else [h, t, k] for h, t, k in sorted(tr.remaining_on_bench)
        ]
        out.write(_dumps({
            "kind": "trial",
            "trial_id": tr.trial_id,
            "duration_seconds": tr.duration_seconds,
            "remaining_on_bench": remaining,
        }) + "\n")
        for a in by_trial.get(tr.trial_id, []):
            rec = {
                "kind": "attempt",
                "trial_id": a.trial_id,
                "hand": a.hand,
                "tool": a.tool,
                "attempt_index": a.attempt_index,
                "outcome": a.outcome.value,
            }
            if a.instance != 1:
                rec["instance"] = a.instance
            out.write(_dumps(rec) + "\n")


def write_simulated_log(out: TextIO, log: SimulatedLog) -> None:
    write_trial_log(out, log.config.benchmark, log.attempts, log.trials)


# ---------------------------------------------------------------- sim config

_PARAM_KEYS = ("p_detect", "p_grasp", "p_place", "p_drop")


def parse_sim_config(data: Any) -> SimConfig:
    """Build a SimConfig from its JSON form.

    ``defaults`` gives parameters for every pair; entries in ``pairs`` override
    them for a single (hand, tool).
    """
    if not isinstance(data, dict):
        raise ValueError("sim config must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
    bench = BenchmarkConfig(
        tuple(data["hands"]), tuple(data["tools"]), int(data.get("instances_per_tool_per_hand", 1))
    )
    defaults = data.get("defaults", {})
    unknown = set(defaults) - set(_PARAM_KEYS)
    if unknown:
        raise ValueError(f"unknown default parameter(s): {sorted(unknown)}")
    params = {pair: PairParams(**defaults) for pair in bench.pairs()}
    for i, entry in enumerate(data.get("pairs", [])):
        pair = (entry.get("hand"), entry.get("tool"))
        if pair not in params:
            raise ValueError(f"pairs[{i}]: unknown pair {pair}")
        merged = {**defaults, **{k: v for k, v in entry.items() if k in _PARAM_KEYS}}
        extra = set(entry) - set(_PARAM_KEYS) - {"hand", "tool"}
        if extra:
            raise ValueError(f"pairs[{i}]: unknown field(s) {sorted(extra)}")
        params[pair] = PairParams(**merged)
    return SimConfig(
        benchmark=bench,
        params=params,
        max_attempts=int(data.get("max_attempts", 1)),
        base_seconds=float(data.get("base_seconds", 60.0)),
        seconds_per_attempt=float(data.get("seconds_per_attempt", 30.0)),
    )


def load_sim_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"line {exc.lineno}: malformed JSON: {exc.msg}") from None
    try:
        return parse_sim_config(data)
    except KeyError as exc:
        raise ValueError(f"missing field {exc}") from None
    except TypeError as exc:
        raise ValueError(str(exc)) from None
