"""System manifests (JSON) and actual-time logs (CSV)."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .decision import (
    Approach,
    ApproachAssessment,
    ComponentEntry,
    LowLevelApproach,
    LowLevelThresholds,
)
from .effort import (
    CONDITIONS,
    DEFAULT_PRIORITIES,
    ConditionScores,
    EffortLevel,
    EfMode,
    PriorityProfile,
)

SCHEMA_VERSION = 1


class ManifestError(ValueError):
    def __init__(self, violations: list[str], path: Optional[str] = None):
        self.violations = violations
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(where + "; ".join(violations))


@dataclass(frozen=True)
class SystemManifest:
    system: str
    priorities: PriorityProfile = DEFAULT_PRIORITIES
    ef_mode: EfMode = EfMode.LITERAL
    thresholds: LowLevelThresholds = LowLevelThresholds()
    components: tuple[ComponentEntry, ...] = ()
    schema_version: int = SCHEMA_VERSION


class _Collector:
    def __init__(self) -> None:
        self.errors: list[str] = []

    def add(self, field: str, msg: str) -> None:
        self.errors.append(f"{field}: {msg}")


def _number(c: _Collector, field: str, value: Any) -> Optional[float]:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        c.add(field, f"expected a number, got {value!r}")
        return None
    return float(value)


def _per_condition(c: _Collector, field: str, raw: Any, kind: str, hi: float) -> Optional[dict]:
    if not isinstance(raw, dict):
        c.add(field, "expected an object keyed by condition")
        return None
    known = {cond.value for cond in CONDITIONS}
    for key in raw:
        if key not in known:
            c.add(f"{field}.{key}", f"unknown condition (expected one of {sorted(known)})")
    out = {}
    ok = True
    for cond in CONDITIONS:
        sub = f"{field}.{cond.value}"
        if cond.value not in raw:
            c.add(sub, "missing")
            ok = False
            continue
        v = _number(c, sub, raw[cond.value])
        if v is None:
            ok = False
        elif not 0.0 <= v <= hi:
            c.add(sub, f"{kind} out of [0,{hi:g}]: {v:g}")
            ok = False
        else:
            out[cond] = v
    return out if ok else None


def _enum(c: _Collector, field: str, raw: Any, enum_cls, label: str):
    try:
        return enum_cls(raw)
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        c.add(field, f"unknown {label} {raw!r} (expected one of: {choices})")
        return None


def _assessment(c: _Collector, field: str, raw: Any, approach: Approach) -> Optional[ApproachAssessment]:
    if not isinstance(raw, dict):
        c.add(field, "expected an object with 'effort' and 'impact'")
        return None
    effort = _enum(c, f"{field}.effort", raw.get("effort"), EffortLevel, "effort level")
    impact = _enum(c, f"{field}.impact", raw.get("impact"), EffortLevel, "effort level")
    if effort is None or impact is None:
        return None
    return ApproachAssessment(approach, effort, impact)


def _component(c: _Collector, idx: int, raw: Any) -> Optional[ComponentEntry]:
    base = f"components[{idx}]"
    if not isinstance(raw, dict):
        c.add(base, "expected an object")
        return None
    name = raw.get("name")
    if not isinstance(name, str) or not name.strip():
        c.add(f"{base}.name", "missing or empty")
        name = None
    n_before = len(c.errors)
    scores = _per_condition(c, f"{base}.scores", raw.get("scores"), "score", 3.0)
    native = _assessment(c, f"{base}.native", raw.get("native"), Approach.NATIVE_INCLUSION)
    container = _assessment(c, f"{base}.container", raw.get("container"), Approach.CONTAINERISATION)

    ef_override = reference_ef = None
    if raw.get("ef_override") is not None:
        ef_override = _number(c, f"{base}.ef_override", raw["ef_override"])
        if ef_override is not None and ef_override < 0:
            c.add(f"{base}.ef_override", "must be >= 0")
    if raw.get("reference_ef") is not None:
        reference_ef = _number(c, f"{base}.reference_ef", raw["reference_ef"])
    high = low = None
    if raw.get("high_level_override") is not None:
        high = _enum(c, f"{base}.high_level_override", raw["high_level_override"], Approach, "approach")
    if raw.get("low_level_override") is not None:
        low = _enum(c, f"{base}.low_level_override", raw["low_level_override"], LowLevelApproach, "approach")

    if name is None or len(c.errors) > n_before:
        return None
    return ComponentEntry(
        name=name,
        scores=ConditionScores(scores),
        native=native,
        container=container,
        ef_override=ef_override,
        high_level_override=high,
        low_level_override=low,
        reference_ef=reference_ef,
        notes=str(raw.get("notes", "")),
    )


def parse_manifest(data: Any, path: Optional[str] = None) -> SystemManifest:
    c = _Collector()
    if not isinstance(data, dict):
        raise ManifestError(["<root>: expected a JSON object"], path)

    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        c.add("schema_version", f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")

    system = data.get("system", "")
    if not isinstance(system, str):
        c.add("system", "expected a string")

    priorities = DEFAULT_PRIORITIES
    if "priorities" in data:
        values = _per_condition(c, "priorities", data["priorities"], "priority", 1.0)
        if values is not None:
            if any(v > 0 for v in values.values()):
                priorities = PriorityProfile(values)
            else:
                c.add("priorities", "degenerate priority profile: all priorities are zero")

    mode = EfMode.LITERAL
    if "ef_mode" in data:
        mode = _enum(c, "ef_mode", data["ef_mode"], EfMode, "e_f mode") or mode

    thresholds = LowLevelThresholds()
    if "thresholds" in data:
        raw = data["thresholds"]
        if not isinstance(raw, dict):
            c.add("thresholds", "expected an object")
        else:
            lo = _number(c, "thresholds.direct_below", raw.get("direct_below", thresholds.direct_below))
            hi = _number(
                c, "thresholds.reimplement_at_or_above",
                raw.get("reimplement_at_or_above", thresholds.reimplement_at_or_above),
            )
            if lo is not None and hi is not None:
                try:
                    thresholds = LowLevelThresholds(lo, hi)
                except ValueError as exc:
                    c.add("thresholds", str(exc))

    components: list[ComponentEntry] = []
    raw_components = data.get("components", [])
    if not isinstance(raw_components, list):
        c.add("components", "expected a list")
        raw_components = []
    seen: set[str] = set()
    for idx, raw in enumerate(raw_components):
        name = raw.get("name") if isinstance(raw, dict) else None
        if isinstance(name, str):
            if name in seen:
                c.add(f"components[{idx}].name", f"duplicate component name {name!r}")
            seen.add(name)
        entry = _component(c, idx, raw)
        if entry is not None:
            components.append(entry)

    if c.errors:
        raise ManifestError(c.errors, path)
    return SystemManifest(
        system=system,
        priorities=priorities,
        ef_mode=mode,
        thresholds=thresholds,
        components=tuple(components),
        schema_version=version,
    )


def load_manifest(path: str | Path) -> SystemManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError([f"line {exc.lineno} column {exc.colno}: malformed JSON: {exc.msg}"], str(path)) from None
    return parse_manifest(data, str(path))


def manifest_to_dict(m: SystemManifest) -> dict:
    def assessment(a: ApproachAssessment) -> dict:
        return {"effort": a.effort.value, "impact": a.impact.value}

    comps = []
    for e in m.components:
        d: dict[str, Any] = {
            "name": e.name,
            "scores": {c.value: e.scores[c] for c in CONDITIONS},
            "native": assessment(e.native),
            "container": assessment(e.container),
        }
        if e.ef_override is not None:
            d["ef_override"] = e.ef_override
        if e.reference_ef is not None:
            d["reference_ef"] = e.reference_ef
        if e.high_level_override is not None:
            d["high_level_override"] = e.high_level_override.value
        if e.low_level_override is not None:
            d["low_level_override"] = e.low_level_override.value
        if e.notes:
            d["notes"] = e.notes
        comps.append(d)
    return {
        "schema_version": m.schema_version,
        "system": m.system,
        "ef_mode": m.ef_mode.value,
        "priorities": {c.value: m.priorities[c] for c in CONDITIONS},
        "thresholds": {
            "direct_below": m.thresholds.direct_below,
            "reimplement_at_or_above": m.thresholds.reimplement_at_or_above,
        },
        "components": comps,
    }


# ---------------------------------------------------------------- actuals

class ActualsError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class ActualRow:
    component: str
    task: str
    person_days: float
    start: Optional[dt.date] = None
    end: Optional[dt.date] = None


def working_days(start: dt.date, end: dt.date) -> int:
    """Weekdays from ``start`` to ``end``, both inclusive."""
    if end < start:
        raise ValueError(f"end {end} before start {start}")
    return int(np.busday_count(start, end + dt.timedelta(days=1)))


ACTUALS_HEADER = ("component", "task", "start", "end", "person_days")


def parse_actuals(text: str) -> list[ActualRow]:
    reader = csv.DictReader(io.StringIO(text))
    missing = [h for h in ("component", "person_days") if h not in (reader.fieldnames or [])]
    if missing:
        raise ActualsError([f"header: missing column(s) {', '.join(missing)}"])
    rows: list[ActualRow] = []
    errors: list[str] = []
    for lineno, rec in enumerate(reader, start=2):
        comp = (rec.get("component") or "").strip()
        task = (rec.get("task") or "").strip()
        start_s = (rec.get("start") or "").strip()
        end_s = (rec.get("end") or "").strip()
        days_s = (rec.get("person_days") or "").strip()
        if not comp:
            errors.append(f"line {lineno}: empty component")
            continue
        try:
            if days_s:
                days = float(days_s)
                if days < 0:
                    raise ValueError("person_days must be >= 0")
                start = dt.date.fromisoformat(start_s) if start_s else None
                end = dt.date.fromisoformat(end_s) if end_s else None
            elif start_s and end_s:
                start, end = dt.date.fromisoformat(start_s), dt.date.fromisoformat(end_s)
                days = float(working_days(start, end)) if end >= start else 0.0
            else:
                raise ValueError("need person_days or both start and end")
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
            continue
        if start and end and end < start:
            errors.append(f"line {lineno}: end {end} before start {start}")
            continue
        rows.append(ActualRow(comp, task, days, start, end))
    if errors:
        raise ActualsError(errors)
    return rows


def load_actuals(path: str | Path) -> list[ActualRow]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {path}") from None
    return parse_actuals(text)
