"""Trace persistence, mapping and config files, and report rendering.

The trace file is line-oriented: one JSON header naming the roster, regions,
declarations, and phases, then one JSON line per step carrying that step's
events. Reading replays the events through the same construction path used
everywhere else, so a structurally broken file fails with the offending step
named. All serialization sorts rosters, movers, and keys, which makes equal
traces produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

from .classify import ActivityScore, IntelligenceReport, attribution
from .categories import LawReport
from .evolution import Phase, Trace, TransferEvent, build_trace
from .scenarios import ScenarioBundle, ScenarioConfig
from .universe import ConstructionError, StructureRelation, make_snapshot

__all__ = [
    "FORMAT_NAME",
    "FORMAT_VERSION",
    "TraceFormatError",
    "ConfigError",
    "MappingFormatError",
    "write_trace",
    "trace_to_text",
    "read_trace",
    "parse_window",
    "load_config",
    "load_mapping",
    "default_mimicry_mapping",
    "mapping_object_map",
    "mapping_components",
    "ReportDocument",
    "render_report",
]

FORMAT_NAME = "mindsets-trace"
FORMAT_VERSION = 1
MAPPING_FORMAT_NAME = "mindsets-mimicry"


class TraceFormatError(ConstructionError):
    """A trace file cannot be understood."""


class ConfigError(ConstructionError):
    """A scenario config file cannot be understood."""


class MappingFormatError(ConstructionError):
    """A mimicry mapping file cannot be understood."""


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _declaration_to_dict(d: StructureRelation) -> dict:
    return {
        "id": d.id,
        "role": d.role,
        "arity": d.arity,
        "factors": list(d.factors),
        "scope": sorted(d.scope),
        "tuples": sorted(list(t) for t in d.tuples),
    }


def _event_to_dict(ev: TransferEvent) -> dict:
    return {
        "kind": ev.kind,
        "from": ev.from_region,
        "to": ev.to_region,
        "moved": sorted(ev.moved),
        "via": ev.via_structure,
        "updates": {eid: dict(attrs) for eid, attrs in ev.state_updates},
    }


def trace_to_text(t: Trace) -> str:
    initial = t.snapshots[0]
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "elements": sorted(
            [eid, region, initial.states[eid]]
            for eid, region in initial.membership.items()
        ),
        "regions": sorted([r, side] for r, side in initial.region_side.items()),
        "declarations": [_declaration_to_dict(d) for d in t.declarations],
        "phases": [[p.label, p.start, p.stop] for p in t.phases],
    }
    lines = [_dumps(header)]
    for i, step_events in enumerate(t.events):
        lines.append(_dumps({"step": i, "events": [_event_to_dict(e) for e in step_events]}))
    return "\n".join(lines) + "\n"


def write_trace(t: Trace, destination: str | Path) -> None:
    Path(destination).write_text(trace_to_text(t))


def _parse_json(line: str, line_no: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise TraceFormatError(f"line {line_no}: expected an object")
    return obj


def read_trace(source: str | Path) -> Trace:
    """Parse and replay a trace file; failures name the line or step."""
    text = Path(source).read_text()
    lines = text.splitlines()
    if not lines:
        raise TraceFormatError("empty trace file")

    header = _parse_json(lines[0], 1)
    if header.get("format") != FORMAT_NAME:
        raise TraceFormatError("line 1: not a trace file")
    if header.get("version") != FORMAT_VERSION:
        raise TraceFormatError(
            f"line 1: unsupported format version {header.get('version')!r}"
        )

    try:
        elements = [(eid, state) for eid, _, state in header["elements"]]
        membership = {eid: region for eid, region, _ in header["elements"]}
        region_side = {r: side for r, side in header["regions"]}
        declarations = [
            StructureRelation(
                id=d["id"],
                role=d["role"],
                arity=d["arity"],
                tuples=frozenset(tuple(t) for t in d["tuples"]),
                scope=frozenset(d["scope"]),
                factors=tuple(d["factors"]),
            )
            for d in header["declarations"]
        ]
        phases = [Phase(label, start, stop) for label, start, stop in header["phases"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceFormatError(f"line 1: malformed header ({exc})") from exc

    initial = make_snapshot(elements, membership, region_side)

    schedule: list[list[TransferEvent]] = []
    for idx, line in enumerate(lines[1:]):
        line_no = idx + 2
        obj = _parse_json(line, line_no)
        if obj.get("step") != idx:
            raise TraceFormatError(f"line {line_no}: expected step {idx}")
        events = []
        try:
            for e in obj["events"]:
                events.append(
                    TransferEvent.make(
                        step=idx,
                        kind=e["kind"],
                        moved=frozenset(e["moved"]),
                        from_region=e["from"],
                        to_region=e["to"],
                        via_structure=e["via"],
                        state_updates=e["updates"] or None,
                    )
                )
        except (KeyError, TypeError) as exc:
            raise TraceFormatError(f"line {line_no}: malformed event ({exc})") from exc
        schedule.append(events)

    return build_trace(initial, schedule, phases, declarations)


def parse_window(text: str) -> tuple[int, int]:
    """Half-open step interval written as A:B."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError("window must be written A:B (half-open)")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError("window bounds must be integers") from None


# ---------------------------------------------------------------------------
# config and mapping files


def load_config(path: str | Path) -> ScenarioConfig:
    """Flat key=value file over ScenarioConfig fields; types come from the field."""
    field_types = {f.name: f.type for f in fields(ScenarioConfig)}
    cfg = ScenarioConfig()
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in field_types:
            raise ConfigError(f"line {line_no}: unknown config key {key!r}")
        kind = field_types[key]
        try:
            if kind == "int":
                parsed: int | float | str = int(value)
            elif kind == "float":
                parsed = float(value)
            else:
                parsed = value
        except ValueError:
            raise ConfigError(f"line {line_no}: bad value for {key!r}") from None
        cfg = replace(cfg, **{key: parsed})
    return cfg


def load_mapping(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MappingFormatError(f"invalid JSON ({exc.msg})") from exc
    _check_mapping_shape(data)
    return data


def default_mimicry_mapping() -> dict:
    text = resources.files("mindsets").joinpath("data/aplysia_to_hebbian.json").read_text()
    data = json.loads(text)
    _check_mapping_shape(data)
    return data


def _check_mapping_shape(data) -> None:
    if not isinstance(data, dict) or data.get("format") != MAPPING_FORMAT_NAME:
        raise MappingFormatError("not a mimicry mapping file")
    if data.get("version") != 1:
        raise MappingFormatError(f"unsupported mapping version {data.get('version')!r}")
    if "components" not in data or not isinstance(data["components"], dict):
        raise MappingFormatError("mapping lacks a components table")
    om = data.get("object_map")
    if om != "identity" and not isinstance(om, list):
        raise MappingFormatError("object_map must be \"identity\" or a pair list")


def mapping_object_map(data: dict, source_len: int) -> tuple[int, ...]:
    """Object table from the file: identity, or explicit [source, target] pairs."""
    om = data["object_map"]
    if om == "identity":
        return tuple(range(source_len))
    try:
        pairs = {int(i): int(j) for i, j in om}
    except (TypeError, ValueError) as exc:
        raise MappingFormatError("object_map pairs must be [int, int]") from exc
    missing = [i for i in range(source_len) if i not in pairs]
    if missing:
        raise MappingFormatError(f"object_map misses source objects {missing}")
    return tuple(pairs[i] for i in range(source_len))


def mapping_components(data: dict) -> dict[str, dict[tuple, tuple]]:
    components: dict[str, dict[tuple, tuple]] = {}
    for role, pairs in data["components"].items():
        try:
            components[role] = {
                tuple(src): tuple(dst) for src, dst in pairs
            }
        except (TypeError, ValueError) as exc:
            raise MappingFormatError(
                f"component map for {role!r} must list [source_tuple, target_tuple] pairs"
            ) from exc
    return components


# ---------------------------------------------------------------------------
# report rendering


@dataclass(frozen=True, eq=True)
class ReportDocument:
    kind: str  # classification, activity, law, oracle, or table
    body: str


def _compress_steps(steps) -> str:
    """Sorted step set as run ranges: 0-5, 9, 12-13."""
    items = sorted(steps)
    if not items:
        return "none"
    runs: list[str] = []
    lo = prev = items[0]
    for s in items[1:]:
        if s == prev + 1:
            prev = s
            continue
        runs.append(str(lo) if lo == prev else f"{lo}-{prev}")
        lo = prev = s
    runs.append(str(lo) if lo == prev else f"{lo}-{prev}")
    return ", ".join(runs)


def _cycle_of(seq: tuple[str, ...]) -> str:
    """Smallest repeating unit when one exists, else a truncated listing."""
    n = len(seq)
    if n == 0:
        return "(quiet)"
    for unit_len in range(1, min(8, n) + 1):
        if n % unit_len == 0 and seq == seq[:unit_len] * (n // unit_len):
            unit = " -> ".join(seq[:unit_len])
            reps = n // unit_len
            return unit if reps == 1 else f"[{unit}] x {reps}"
    shown = ", ".join(seq[:12])
    return shown if n <= 12 else f"{shown}, ..."


def _window_str(window: tuple[int, int]) -> str:
    return f"{window[0]}:{window[1]}"


def _classification_body(report: IntelligenceReport) -> str:
    lines = [
        "# Classification",
        "",
        f"window: {_window_str(report.window)}",
        f"verdict: {'true' if report.verdict else 'false'}",
        "",
        "| condition | held | witnessed steps |",
        "| --- | --- | --- |",
    ]
    held = {
        "input": report.has_input,
        "processing": report.has_processing,
        "output": report.has_output,
    }
    for condition in ("input", "processing", "output"):
        steps = report.steps_with(condition)
        lines.append(
            f"| {condition} | {'yes' if held[condition] else 'no'} | {_compress_steps(steps)} |"
        )
    lines += ["", f"attribution: {_cycle_of(report.attribution)}"]
    return "\n".join(lines) + "\n"


def _activity_body(score: ActivityScore) -> str:
    emphasis = "step_activity" if score.mode == "step" else "element_rate"
    return (
        "# Activity\n\n"
        f"window: {_window_str(score.window)}\n"
        f"step_activity: {score.step_activity}\n"
        f"element_rate: {score.element_rate}\n"
        f"reported metric: {emphasis}\n"
    )


def _law_body(report: LawReport) -> str:
    lines = [
        "# Functor laws",
        "",
        f"objects checked: {report.objects_checked}",
        f"composition triples checked: {report.triples_checked}",
    ]
    if report.passed:
        lines.append("result: all laws hold")
    else:
        lines.append(f"result: {len(report.failures)} failure(s)")
        lines.append("")
        lines.append("| law | at | detail |")
        lines.append("| --- | --- | --- |")
        for f in report.failures:
            lines.append(f"| {f.law} | {f.at} | {f.detail} |")
    return "\n".join(lines) + "\n"


def _oracle_body(reports: tuple[IntelligenceReport, IntelligenceReport]) -> str:
    fast, oracle = reports
    lines = [
        "# Oracle comparison",
        "",
        f"window: {_window_str(fast.window)}",
        f"classify verdict: {'true' if fast.verdict else 'false'}",
        f"oracle verdict: {'true' if oracle.verdict else 'false'}",
    ]
    mismatches = []
    if fast.verdict != oracle.verdict:
        mismatches.append("verdict")
    for condition in ("input", "processing", "output"):
        a, b = fast.steps_with(condition), oracle.steps_with(condition)
        if a != b:
            mismatches.append(
                f"{condition} steps ({_compress_steps(a)} vs {_compress_steps(b)})"
            )
    if mismatches:
        lines.append("agreement: no")
        for m in mismatches:
            lines.append(f"- mismatch: {m}")
    else:
        lines.append("agreement: yes")
    return "\n".join(lines) + "\n"


def _table_body(trace: Trace, name: str | None = None, extra: list[str] | None = None) -> str:
    lines = ["# Structures" if name is None else f"# Structures: {name}", ""]
    lines.append("| structure | role | arity | members | scope |")
    lines.append("| --- | --- | --- | --- | --- |")
    for d in trace.declarations:
        lines.append(
            f"| {d.id} | {d.role} | {d.arity} | {len(d.tuples)} | {', '.join(sorted(d.scope))} |"
        )
    lines += ["", "# Phases", "", "| phase | steps | role cycle |", "| --- | --- | --- |"]
    for p in trace.phases:
        if p.stop > p.start:
            cycle = _cycle_of(attribution(trace, (p.start, p.stop)))
        else:
            cycle = "(empty)"
        lines.append(f"| {p.label} | {p.start}:{p.stop} | {cycle} |")
    if extra:
        lines += [""] + extra
    return "\n".join(lines) + "\n"


def render_report(subject) -> ReportDocument:
    """Deterministic markdown for any of the library's result values."""
    if isinstance(subject, IntelligenceReport):
        return ReportDocument("classification", _classification_body(subject))
    if isinstance(subject, ActivityScore):
        return ReportDocument("activity", _activity_body(subject))
    if isinstance(subject, LawReport):
        return ReportDocument("law", _law_body(subject))
    if isinstance(subject, tuple) and len(subject) == 2 and all(
        isinstance(r, IntelligenceReport) for r in subject
    ):
        return ReportDocument("oracle", _oracle_body(subject))
    if isinstance(subject, ScenarioBundle):
        extra = []
        graded = [r for r in subject.trials if r.correct is not None]
        if graded:
            extra.append(f"test accuracy: {subject.accuracy():.3f}")
        return ReportDocument("table", _table_body(subject.trace, subject.name, extra))
    if isinstance(subject, Trace):
        return ReportDocument("table", _table_body(subject))
    raise ConstructionError(f"cannot render a report for {type(subject).__name__}")
