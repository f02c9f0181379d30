"""Possession witnesses, the qualification verdict, and the activity metric.

A trace possesses the input condition at a step when some system region's
count strictly grew and that growth involved elements arriving from the
environment; output is the mirror image; processing needs two system regions
with strictly opposite count changes caused only by internal movement. The
verdict over a window is existential: all three conditions witnessed
somewhere inside it.

``classify`` reads the recorded events. ``brute_force_classify`` is the
oracle: it rederives boundary crossings from raw snapshots and decides each
condition by exhaustive enumeration of region subsets, so the two
implementations share no inference code. Attribution (the declared-role
sequence used for cycle tables) is deliberately independent of witnessing:
it reads ``via_structure`` tags and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .evolution import EXTERNAL_IN, EXTERNAL_OUT, INTERNAL, Trace
from .universe import ConstructionError, ElementId, RegionId, Snapshot

__all__ = [
    "CONDITIONS",
    "WindowError",
    "Witness",
    "IntelligenceReport",
    "ActivityScore",
    "attribution",
    "witness_input",
    "witness_output",
    "witness_processing",
    "classify",
    "brute_force_classify",
    "activity",
]

CONDITIONS = ("input", "processing", "output")


class WindowError(ConstructionError):
    """A step window is empty or reaches outside the trace."""


def check_window(t: Trace, window: tuple[int, int]) -> tuple[int, int]:
    start, stop = window
    if start >= stop:
        raise WindowError(f"empty window {start}:{stop}")
    if start < 0 or stop > t.n_steps:
        raise WindowError(f"window {start}:{stop} outside steps 0:{t.n_steps}")
    return start, stop


def _check_step(t: Trace, step: int) -> None:
    if not (0 <= step < t.n_steps):
        raise WindowError(f"step {step} outside steps 0:{t.n_steps}")


@dataclass(frozen=True, eq=True)
class Witness:
    """Evidence that one condition held across a single step.

    ``grown_region`` is the system region whose count strictly rose (input
    and processing), ``shrunk_region`` the one that strictly fell (output and
    processing); the unused side is None. ``movers`` are the elements whose
    movement carried the change: arrivals from the environment, departures
    to it, or the internal movers entering the grown and leaving the shrunk
    region.
    """

    condition: str
    step: int
    grown_region: RegionId | None
    shrunk_region: RegionId | None
    movers: frozenset[ElementId]


@dataclass(frozen=True, eq=True)
class IntelligenceReport:
    """Aggregated witnesses over a half-open step window.

    ``attribution`` has one entry per step: the role of the structure its
    events were tagged with, "other" for untagged steps, and a "+"-joined
    sorted list when one step carries tags of several roles.
    """

    window: tuple[int, int]
    witnesses: tuple[Witness, ...]
    has_input: bool
    has_processing: bool
    has_output: bool
    verdict: bool
    attribution: tuple[str, ...]

    def witnesses_for(self, condition: str) -> tuple[Witness, ...]:
        return tuple(w for w in self.witnesses if w.condition == condition)

    def steps_with(self, condition: str) -> frozenset[int]:
        return frozenset(w.step for w in self.witnesses if w.condition == condition)


@dataclass(frozen=True, eq=True)
class ActivityScore:
    """How busy the system boundary is over a window.

    ``step_activity`` is the fraction of steps with at least one boundary
    crossing; ``element_rate`` is boundary-moved elements per step. ``mode``
    records which estimator the caller asked for; both are always computed.
    """

    window: tuple[int, int]
    step_activity: float
    element_rate: float
    mode: str = "step"


def attribution(t: Trace, window: tuple[int, int]) -> tuple[str, ...]:
    """Per-step declared-role sequence from via_structure tags."""
    start, stop = check_window(t, window)
    roles_by_id = {d.id: d.role for d in t.declarations}
    out: list[str] = []
    for i in range(start, stop):
        roles = sorted(
            {roles_by_id[ev.via_structure] for ev in t.events[i] if ev.via_structure}
        )
        if not roles:
            out.append("other")
        elif len(roles) == 1:
            out.append(roles[0])
        else:
            out.append("+".join(roles))
    return tuple(out)


def _region_deltas(before: Snapshot, after: Snapshot) -> dict[RegionId, int]:
    prev = before.region_counts()
    curr = after.region_counts()
    return {r: curr[r] - prev[r] for r in before.region_side}


def _step_witnesses_from_movement(
    step: int,
    snapshot: Snapshot,
    delta: dict[RegionId, int],
    arrivals_in: dict[RegionId, set[ElementId]],
    departures_out: dict[RegionId, set[ElementId]],
    arrivals_internal: dict[RegionId, set[ElementId]],
    departures_internal: dict[RegionId, set[ElementId]],
) -> list[Witness]:
    """Build the canonical region-level witness list for one step.

    Shared between the event reader and the oracle; each feeds it movement
    facts gathered its own way. Order: inputs by grown region, processings
    by (grown, shrunk), outputs by shrunk region.
    """
    system = sorted(snapshot.system_regions())
    witnesses: list[Witness] = []

    for r in system:
        if delta[r] > 0 and arrivals_in.get(r):
            witnesses.append(
                Witness(
                    condition="input",
                    step=step,
                    grown_region=r,
                    shrunk_region=None,
                    movers=frozenset(arrivals_in[r]),
                )
            )

    def clean(r: RegionId) -> bool:
        return not arrivals_in.get(r) and not departures_out.get(r)

    for r in system:
        if delta[r] <= 0 or not clean(r):
            continue
        for s in system:
            if s == r or delta[s] >= 0 or not clean(s):
                continue
            movers = arrivals_internal.get(r, set()) | departures_internal.get(s, set())
            witnesses.append(
                Witness(
                    condition="processing",
                    step=step,
                    grown_region=r,
                    shrunk_region=s,
                    movers=frozenset(movers),
                )
            )

    for s in system:
        if delta[s] < 0 and departures_out.get(s):
            witnesses.append(
                Witness(
                    condition="output",
                    step=step,
                    grown_region=None,
                    shrunk_region=s,
                    movers=frozenset(departures_out[s]),
                )
            )
    return witnesses


def _movement_from_events(t: Trace, step: int):
    arrivals_in: dict[RegionId, set[ElementId]] = {}
    departures_out: dict[RegionId, set[ElementId]] = {}
    arrivals_internal: dict[RegionId, set[ElementId]] = {}
    departures_internal: dict[RegionId, set[ElementId]] = {}
    for ev in t.events[step]:
        if ev.kind == EXTERNAL_IN:
            arrivals_in.setdefault(ev.to_region, set()).update(ev.moved)
        elif ev.kind == EXTERNAL_OUT:
            departures_out.setdefault(ev.from_region, set()).update(ev.moved)
        elif ev.kind == INTERNAL:
            arrivals_internal.setdefault(ev.to_region, set()).update(ev.moved)
            departures_internal.setdefault(ev.from_region, set()).update(ev.moved)
    return arrivals_in, departures_out, arrivals_internal, departures_internal


def _step_witnesses(t: Trace, step: int) -> list[Witness]:
    before, after = t.snapshots[step], t.snapshots[step + 1]
    return _step_witnesses_from_movement(
        step,
        before,
        _region_deltas(before, after),
        *_movement_from_events(t, step),
    )


def _first(witnesses: list[Witness], condition: str) -> Witness | None:
    for w in witnesses:
        if w.condition == condition:
            return w
    return None


def witness_input(t: Trace, step: int) -> Witness | None:
    _check_step(t, step)
    return _first(_step_witnesses(t, step), "input")


def witness_output(t: Trace, step: int) -> Witness | None:
    _check_step(t, step)
    return _first(_step_witnesses(t, step), "output")


def witness_processing(t: Trace, step: int) -> Witness | None:
    _check_step(t, step)
    return _first(_step_witnesses(t, step), "processing")


def classify(t: Trace, window: tuple[int, int]) -> IntelligenceReport:
    """Aggregate witnesses over the window and render the verdict."""
    start, stop = check_window(t, window)
    witnesses: list[Witness] = []
    for i in range(start, stop):
        witnesses.extend(_step_witnesses(t, i))
    has = {c: any(w.condition == c for w in witnesses) for c in CONDITIONS}
    return IntelligenceReport(
        window=(start, stop),
        witnesses=tuple(witnesses),
        has_input=has["input"],
        has_processing=has["processing"],
        has_output=has["output"],
        verdict=has["input"] and has["processing"] and has["output"],
        attribution=attribution(t, (start, stop)),
    )


def _movement_from_snapshots(before: Snapshot, after: Snapshot):
    """Rederive boundary and internal movers purely from membership diffs."""
    arrivals_in: dict[RegionId, set[ElementId]] = {}
    departures_out: dict[RegionId, set[ElementId]] = {}
    arrivals_internal: dict[RegionId, set[ElementId]] = {}
    departures_internal: dict[RegionId, set[ElementId]] = {}
    for eid, src in before.membership.items():
        dst = after.membership[eid]
        if src == dst:
            continue
        src_side, dst_side = before.region_side[src], before.region_side[dst]
        if src_side == "environment" and dst_side == "system":
            arrivals_in.setdefault(dst, set()).add(eid)
        elif src_side == "system" and dst_side == "environment":
            departures_out.setdefault(src, set()).add(eid)
        elif src_side == "system" and dst_side == "system":
            arrivals_internal.setdefault(dst, set()).add(eid)
            departures_internal.setdefault(src, set()).add(eid)
    return arrivals_in, departures_out, arrivals_internal, departures_internal


def _subset_deltas(regions, delta):
    return sum(delta[r] for r in regions)


def _exists_subset_input(system, delta, touched) -> bool:
    for size in range(1, len(system) + 1):
        for subset in combinations(system, size):
            if _subset_deltas(subset, delta) > 0 and any(r in touched for r in subset):
                return True
    return False


def _exists_subset_pair_processing(system, delta, boundary_touched) -> bool:
    clean = [r for r in system if r not in boundary_touched]
    for size_t in range(1, len(clean) + 1):
        for grown in combinations(clean, size_t):
            if _subset_deltas(grown, delta) <= 0:
                continue
            rest = [r for r in clean if r not in grown]
            for size_v in range(1, len(rest) + 1):
                for shrunk in combinations(rest, size_v):
                    if _subset_deltas(shrunk, delta) < 0:
                        return True
    return False


def brute_force_classify(t: Trace, window: tuple[int, int]) -> IntelligenceReport:
    """Decide the conditions by subset enumeration over raw snapshots.

    Existence of each condition is settled by enumerating region subsets
    (pairs of disjoint subsets for processing), taking the cardinality
    definitions literally. The witness list is the canonical region-level
    one so that, on traces whose steps keep event footprints disjoint, the
    whole report equals classify's. A disagreement between the subset
    verdict and the region-level witnesses is surfaced, not hidden: the
    booleans come from the enumeration, the witness list from the regions.
    """
    start, stop = check_window(t, window)
    if len(t.snapshots[0].membership) > 12 or stop - start > 8:
        raise ConstructionError(
            "size guard exceeded: brute_force_classify needs at most "
            "12 elements and a window of at most 8 steps"
        )

    witnesses: list[Witness] = []
    has = {c: False for c in CONDITIONS}
    for i in range(start, stop):
        before, after = t.snapshots[i], t.snapshots[i + 1]
        movement = _movement_from_snapshots(before, after)
        arrivals_in, departures_out, _, _ = movement
        delta = _region_deltas(before, after)
        witnesses.extend(
            _step_witnesses_from_movement(i, before, delta, *movement)
        )
        system = sorted(before.system_regions())
        neg_delta = {r: -d for r, d in delta.items()}
        if not has["input"]:
            has["input"] = _exists_subset_input(system, delta, arrivals_in)
        if not has["output"]:
            has["output"] = _exists_subset_input(system, neg_delta, departures_out)
        if not has["processing"]:
            boundary_touched = set(arrivals_in) | set(departures_out)
            has["processing"] = _exists_subset_pair_processing(
                system, delta, boundary_touched
            )

    return IntelligenceReport(
        window=(start, stop),
        witnesses=tuple(witnesses),
        has_input=has["input"],
        has_processing=has["processing"],
        has_output=has["output"],
        verdict=has["input"] and has["processing"] and has["output"],
        attribution=attribution(t, (start, stop)),
    )


def activity(t: Trace, window: tuple[int, int], mode: str = "step") -> ActivityScore:
    """Boundary-traffic metric over a non-empty window."""
    if mode not in ("step", "element"):
        raise ConstructionError(f"unknown activity mode {mode!r}")
    start, stop = check_window(t, window)
    length = stop - start
    active_steps = 0
    moved = 0
    for i in range(start, stop):
        crossings = [ev for ev in t.events[i] if ev.kind in (EXTERNAL_IN, EXTERNAL_OUT)]
        if crossings:
            active_steps += 1
            moved += sum(len(ev.moved) for ev in crossings)
    return ActivityScore(
        window=(start, stop),
        step_activity=active_steps / length,
        element_rate=moved / length,
        mode=mode,
    )
