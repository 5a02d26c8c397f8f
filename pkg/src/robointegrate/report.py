"""Plan, calibration and benchmark reports in text, CSV and JSON."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping, Optional, Sequence

from .decision import ComponentPlan, plan_component
from .effort import CONDITIONS, EfMode, TimeRange, compute_effort_coefficient
from .manifest import ActualRow, SystemManifest
from .metrics import (
    FAILURE_TYPES,
    BenchmarkConfig,
    FailureTally,
    MeanStdev,
    SuccessMetrics,
)

FORMATS = ("text", "csv", "json")

# midpoint proxy for unbounded ranges: lower bound plus this many days
UNBOUNDED_MIDPOINT_MARGIN = 3.0


@dataclass(frozen=True)
class Table:
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


def render_text_table(table: Table) -> str:
    widths = [len(h) for h in table.headers]
    for row in table.rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    def line(cells: Sequence[str]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(table.headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in table.rows)
    return "\n".join(out) + "\n"


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.headers)
    writer.writerows(table.rows)
    return buf.getvalue()


def render_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _f3(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.3f}"


def _with_mode(manifest: SystemManifest, mode: Optional[EfMode]) -> SystemManifest:
    return manifest if mode is None else replace(manifest, ef_mode=mode)


# ---------------------------------------------------------------- plans

def plan_manifest(manifest: SystemManifest) -> list[ComponentPlan]:
    return [
        plan_component(e, manifest.priorities, manifest.ef_mode, manifest.thresholds)
        for e in manifest.components
    ]


def _mode_notes(manifest: SystemManifest) -> list[str]:
    notes = []
    if manifest.ef_mode is EfMode.LITERAL and any(e.reference_ef is not None for e in manifest.components):
        notes.append(
            "literal mode weights each condition score by its priority; the reference values "
            "in this manifest match unweighted scores in the numerator "
            "(use --ef-mode legacy to compare)"
        )
    if manifest.ef_mode is EfMode.LEGACY:
        notes.append(
            "legacy mode sums unweighted scores over the priority-weighted maximum; "
            "values can exceed 1 when priorities are below 1"
        )
    return notes


def plan_report_data(manifest: SystemManifest, mode: Optional[EfMode] = None) -> dict:
    manifest = _with_mode(manifest, mode)
    plans = plan_manifest(manifest)
    comps = []
    for p in plans:
        comps.append({
            "name": p.name,
            "ef": p.low.ef.value,
            "ef_mode": p.low.ef.mode.value,
            "ef_overridden": p.low.ef.overridden,
            "c_total": p.low.ef.c_total,
            "c_max": p.low.ef.c_max,
            "high_level": p.high.chosen.value,
            "native_score": p.high.native_score,
            "container_score": p.high.container_score,
            "high_level_overridden": p.high.overridden,
            "high_level_time": p.high.predicted_time.to_dict(),
            "high_level_rationale": p.high.rationale,
            "low_level": p.low.chosen.value,
            "low_level_overridden": p.low.overridden,
            "low_level_rationale": p.low.rationale,
            "low_level_days": p.low_level_days,
            "total_time": p.total_time.to_dict(),
            "warnings": list(p.warnings),
        })
    return {
        "report": "plan",
        "system": manifest.system,
        "ef_mode": manifest.ef_mode.value,
        "priorities": {c.value: manifest.priorities[c] for c in CONDITIONS},
        "thresholds": {
            "direct_below": manifest.thresholds.direct_below,
            "reimplement_at_or_above": manifest.thresholds.reimplement_at_or_above,
        },
        "components": comps,
        "notes": _mode_notes(manifest),
    }


PLAN_HEADERS = (
    "component", "e_f", "mode", "high_level", "high_level_time",
    "low_level", "low_level_days", "total_time", "warnings",
)


def plan_table(data: Mapping) -> Table:
    rows = []
    for c in data["components"]:
        ef = _f3(c["ef"]) + ("*" if c["ef_overridden"] else "")
        high = c["high_level"] + (" (override)" if c["high_level_overridden"] else "")
        low = c["low_level"] + (" (override)" if c["low_level_overridden"] else "")
        rows.append((
            c["name"], ef, c["ef_mode"], high,
            str(TimeRange.from_dict(c["high_level_time"])),
            low, str(c["low_level_days"]),
            str(TimeRange.from_dict(c["total_time"])),
            str(len(c["warnings"])),
        ))
    return Table(PLAN_HEADERS, tuple(rows))


def _footer(data: Mapping) -> str:
    lines = []
    for c in data["components"]:
        for w in c["warnings"]:
            lines.append(f"warning: {c['name']}: {w}")
    for n in data.get("notes", []):
        lines.append(f"note: {n}")
    return "".join(l + "\n" for l in lines)


def emit_plan_report(manifest: SystemManifest, fmt: str = "text", mode: Optional[EfMode] = None) -> str:
    data = plan_report_data(manifest, mode)
    if fmt == "json":
        return render_json(data)
    table = plan_table(data)
    if fmt == "csv":
        return render_csv(table)
    head = f"Integration plan: {data['system']} (e_f mode: {data['ef_mode']})\n\n"
    foot = _footer(data)
    return head + render_text_table(table) + ("\n" + foot if foot else "")


def assess_report_data(manifest: SystemManifest, mode: Optional[EfMode] = None) -> dict:
    manifest = _with_mode(manifest, mode)
    rows = []
    for e in manifest.components:
        ef = compute_effort_coefficient(e.scores, manifest.priorities, manifest.ef_mode)
        diff = None if e.reference_ef is None else ef.value - e.reference_ef
        rows.append({
            "name": e.name,
            "scores": {c.value: e.scores[c] for c in CONDITIONS},
            "ef": ef.value,
            "c_total": ef.c_total,
            "c_max": ef.c_max,
            "reference_ef": e.reference_ef,
            "reference_diff": diff,
            "exceeds_unit": ef.exceeds_unit,
        })
    return {
        "report": "assess",
        "system": manifest.system,
        "ef_mode": manifest.ef_mode.value,
        "components": rows,
        "notes": _mode_notes(manifest),
    }


def emit_assess_report(manifest: SystemManifest, fmt: str = "text", mode: Optional[EfMode] = None) -> str:
    data = assess_report_data(manifest, mode)
    if fmt == "json":
        return render_json(data)
    headers = ("component", *(c.value for c in CONDITIONS), "c_total", "c_max", "e_f", "reference", "diff")
    rows = []
    for r in data["components"]:
        rows.append((
            r["name"], *(f"{r['scores'][c.value]:g}" for c in CONDITIONS),
            f"{r['c_total']:g}", f"{r['c_max']:g}", _f3(r["ef"]), _f3(r["reference_ef"]),
            "" if r["reference_diff"] is None else f"{r['reference_diff']:+.3f}",
        ))
    table = Table(headers, tuple(rows))
    if fmt == "csv":
        return render_csv(table)
    foot = []
    for r in data["components"]:
        if r["reference_diff"] is not None and abs(r["reference_diff"]) > 1e-3:
            foot.append(f"warning: {r['name']}: computed {r['ef']:.3f} differs from reference {r['reference_ef']:.3f}")
        if r["exceeds_unit"]:
            foot.append(f"warning: {r['name']}: e_f exceeds 1 (unclamped)")
    foot += [f"note: {n}" for n in data["notes"]]
    head = f"Effort coefficients: {data['system']} (e_f mode: {data['ef_mode']})\n\n"
    return head + render_text_table(table) + ("\n" + "\n".join(foot) + "\n" if foot else "")


# ---------------------------------------------------------------- calibration

class CalibrationError(ValueError):
    def __init__(self, unmatched: Sequence[str]):
        self.unmatched = list(unmatched)
        super().__init__("actuals reference unknown component(s): " + ", ".join(self.unmatched))


@dataclass(frozen=True)
class CalibrationRow:
    component: str
    predicted: TimeRange
    actual_days: float
    within_range: bool
    midpoint: float
    error: float
    midpoint_is_proxy: bool


@dataclass(frozen=True)
class CalibrationReport:
    rows: tuple[CalibrationRow, ...]
    slack: float
    unestimated: tuple[str, ...] = ()

    @property
    def hits(self) -> int:
        return sum(r.within_range for r in self.rows)

    @property
    def hit_rate(self) -> Optional[float]:
        return self.hits / len(self.rows) if self.rows else None


def calibrate(
    manifest: SystemManifest,
    actuals: Iterable[ActualRow],
    slack: float = 0.0,
    plans: Optional[Sequence[ComponentPlan]] = None,
) -> CalibrationReport:
    """Compare predicted total time with logged person-days.

    Multiple rows for one component are summed. Components without actuals
    are listed in ``unestimated`` and left out of the hit rate.
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    plans = list(plans) if plans is not None else plan_manifest(manifest)
    by_name = {p.name: p for p in plans}
    totals: dict[str, float] = defaultdict(float)
    unmatched: list[str] = []
    for row in actuals:
        if row.component not in by_name:
            if row.component not in unmatched:
                unmatched.append(row.component)
            continue
        totals[row.component] += row.person_days
    if unmatched:
        raise CalibrationError(unmatched)

    rows = []
    for p in plans:
        if p.name not in totals:
            continue
        actual = totals[p.name]
        mid = p.total_time.midpoint(UNBOUNDED_MIDPOINT_MARGIN)
        rows.append(CalibrationRow(
            component=p.name,
            predicted=p.total_time,
            actual_days=actual,
            within_range=p.total_time.contains(actual, slack),
            midpoint=mid,
            error=actual - mid,
            midpoint_is_proxy=not p.total_time.bounded,
        ))
    missing = tuple(p.name for p in plans if p.name not in totals)
    return CalibrationReport(tuple(rows), slack, missing)


def calibration_data(report: CalibrationReport) -> dict:
    return {
        "report": "calibration",
        "slack": report.slack,
        "hits": report.hits,
        "total": len(report.rows),
        "hit_rate": report.hit_rate,
        "components": [
            {
                "name": r.component,
                "predicted": r.predicted.to_dict(),
                "actual_days": r.actual_days,
                "within_range": r.within_range,
                "midpoint": r.midpoint,
                "error": r.error,
                "midpoint_is_proxy": r.midpoint_is_proxy,
            }
            for r in report.rows
        ],
        "unestimated": list(report.unestimated),
    }


def emit_calibration_report(report: CalibrationReport, fmt: str = "text") -> str:
    data = calibration_data(report)
    if fmt == "json":
        return render_json(data)
    rows = []
    for r in report.rows:
        rows.append((
            r.component, str(r.predicted), f"{r.actual_days:g}",
            "yes" if r.within_range else "no",
            f"{r.midpoint:g}" + (" (proxy)" if r.midpoint_is_proxy else ""),
            f"{r.error:+g}",
        ))
    table = Table(("component", "predicted", "actual", "within_range", "midpoint", "error"), tuple(rows))
    if fmt == "csv":
        return render_csv(table)
    rate = "n/a" if report.hit_rate is None else f"{report.hit_rate:.3f}"
    lines = [f"Predicted vs actual integration time (slack {report.slack:g} days)", "", render_text_table(table).rstrip("\n"), ""]
    lines.append(f"hit rate: {report.hits}/{len(report.rows)} = {rate}")
    if any(r.midpoint_is_proxy for r in report.rows):
        lines.append(f"note: unbounded ranges use lower bound + {UNBOUNDED_MIDPOINT_MARGIN:g} days as midpoint")
    for name in report.unestimated:
        lines.append(f"note: no actuals for {name}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- benchmark

def bench_report_data(
    config: BenchmarkConfig,
    success: SuccessMetrics,
    completion: MeanStdev,
    mpph: MeanStdev,
    failures: FailureTally,
    n_trials: int,
) -> dict:
    pairs = []
    for h, t in config.pairs():
        m = success[(h, t)]
        pairs.append({
            "hand": h,
            "tool": t,
            "precision": m.precision,
            "attempt_rate": m.attempt_rate,
            "success_rate": m.success_rate,
            "observations": m.observations,
            "precision_skipped": m.precision_skipped,
            "rate_skipped": m.rate_skipped,
            "failures": {k.value: failures.get(h, t, k) for k in FAILURE_TYPES},
        })
    return {
        "report": "bench",
        "estimator": success.estimator.value,
        "trials": n_trials,
        "hands": list(config.hands),
        "tools": list(config.tools),
        "max_completion_score": config.max_completion_score,
        "completion_score": {"mean": completion.mean, "stdev": completion.stdev},
        "mpph": {"mean": mpph.mean, "stdev": mpph.stdev},
        "pairs": pairs,
        "flags": list(success.flags),
    }


def bench_table(data: Mapping) -> Table:
    headers = (
        "hand", "tool", "P", "A", "R", "p_skipped", "rate_skipped",
        *(k.value for k in FAILURE_TYPES),
    )
    rows = tuple(
        (
            p["hand"], p["tool"], _f3(p["precision"]), _f3(p["attempt_rate"]), _f3(p["success_rate"]),
            str(p["precision_skipped"]), str(p["rate_skipped"]),
            *(str(p["failures"][k.value]) for k in FAILURE_TYPES),
        )
        for p in data["pairs"]
    )
    return Table(headers, rows)


def emit_bench_report(data: Mapping, fmt: str = "text") -> str:
    if fmt == "json":
        return render_json(data)
    table = bench_table(data)
    if fmt == "csv":
        return render_csv(table)
    s, m = data["completion_score"], data["mpph"]
    lines = [
        f"Benchmark over {data['trials']} trial(s), estimator: {data['estimator']}",
        "",
        f"{'metric':<40}{'mean':>10}{'stdev':>10}",
        f"{'task completion score (max of ' + str(data['max_completion_score']) + ')':<40}{s['mean']:>10.2f}{s['stdev']:>10.2f}",
        f"{'mean picks per hour':<40}{m['mean']:>10.2f}{m['stdev']:>10.2f}",
        "",
        render_text_table(table).rstrip("\n"),
    ]
    lines += [f"flag: {f}" for f in data["flags"]]
    return "\n".join(lines) + "\n"
