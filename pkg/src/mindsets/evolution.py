"""Step-indexed time evolution of a finite universe.

Each step is a list of ``TransferEvent`` values applied atomically to one
snapshot, producing the next. Events move elements between regions (the
element roster never changes) and may update element states in the same step,
which is how learning rides on internal events without any membership change.
A ``Trace`` is the full history: snapshots, per-step events, phase labels,
and structure declarations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .universe import (
    ENVIRONMENT,
    SYSTEM,
    ConstructionError,
    ElementId,
    RegionId,
    Snapshot,
    State,
    StructureRelation,
)

__all__ = [
    "EXTERNAL_IN",
    "EXTERNAL_OUT",
    "INTERNAL",
    "EVENT_KINDS",
    "StepError",
    "TransferEvent",
    "Phase",
    "Trace",
    "ConservationViolation",
    "apply_step",
    "build_trace",
    "verify_conservation",
]

EXTERNAL_IN = "external_in"
EXTERNAL_OUT = "external_out"
INTERNAL = "internal"
EVENT_KINDS = (EXTERNAL_IN, EXTERNAL_OUT, INTERNAL)


class StepError(ConstructionError):
    """An event list cannot be applied to the snapshot it targets."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True, eq=True)
class TransferEvent:
    """Movement of one or more elements between two regions in one step.

    ``external_in`` crosses from an environment region into a system region,
    ``external_out`` the reverse, ``internal`` stays within the system side.
    ``state_updates`` may adjust the state of any elements (moved or not) as
    part of the same step. ``via_structure`` optionally attributes the event
    to a declared structure.
    """

    step: int
    kind: str
    moved: frozenset[ElementId]
    from_region: RegionId
    to_region: RegionId
    via_structure: str | None = None
    state_updates: tuple[tuple[ElementId, tuple[tuple[str, int | float | str], ...]], ...] = ()

    @staticmethod
    def make(
        step: int,
        kind: str,
        moved: frozenset[ElementId] | set[ElementId],
        from_region: RegionId,
        to_region: RegionId,
        via_structure: str | None = None,
        state_updates: dict[ElementId, State] | None = None,
    ) -> "TransferEvent":
        """Normalize plain dict state updates into the stored sorted form."""
        packed: tuple[tuple[ElementId, tuple[tuple[str, int | float | str], ...]], ...] = ()
        if state_updates:
            packed = tuple(
                (eid, tuple(sorted(attrs.items())))
                for eid, attrs in sorted(state_updates.items())
            )
        return TransferEvent(
            step=step,
            kind=kind,
            moved=frozenset(moved),
            from_region=from_region,
            to_region=to_region,
            via_structure=via_structure,
            state_updates=packed,
        )

    def updates(self) -> dict[ElementId, State]:
        return {eid: dict(attrs) for eid, attrs in self.state_updates}


@dataclass(frozen=True, eq=True)
class Phase:
    """A labeled half-open step interval [start, stop)."""

    label: str
    start: int
    stop: int


def _check_event(s: Snapshot, ev: TransferEvent) -> None:
    if ev.step != s.step:
        raise StepError(s.step, f"event carries step {ev.step}")
    if ev.kind not in EVENT_KINDS:
        raise StepError(s.step, f"unknown event kind {ev.kind!r}")
    if not ev.moved:
        raise StepError(s.step, "event moves no elements")
    for region in (ev.from_region, ev.to_region):
        if region not in s.region_side:
            raise StepError(s.step, f"unknown region {region!r}")
    if ev.from_region == ev.to_region:
        raise StepError(s.step, "event moves nothing across regions")

    from_side = s.region_side[ev.from_region]
    to_side = s.region_side[ev.to_region]
    expected = {
        EXTERNAL_IN: (ENVIRONMENT, SYSTEM),
        EXTERNAL_OUT: (SYSTEM, ENVIRONMENT),
        INTERNAL: (SYSTEM, SYSTEM),
    }[ev.kind]
    if (from_side, to_side) != expected:
        raise StepError(
            s.step,
            f"{ev.kind} event connects {from_side} to {to_side} "
            f"({ev.from_region!r} to {ev.to_region!r})",
        )

    for eid, _ in ev.state_updates:
        if eid not in s.membership:
            raise StepError(s.step, f"state update names unknown element {eid!r}")


def _check_movers(s: Snapshot, ev: TransferEvent) -> None:
    for eid in ev.moved:
        if eid not in s.membership:
            raise StepError(s.step, f"unknown element {eid!r}")
        if s.membership[eid] != ev.from_region:
            raise StepError(
                s.step,
                f"element {eid!r} is in {s.membership[eid]!r}, not {ev.from_region!r}",
            )


def apply_step(s: Snapshot, events: list[TransferEvent]) -> Snapshot:
    """Apply one step's events atomically, returning the next snapshot.

    An element may be moved by at most one event per step, which rules out in
    particular any element crossing the system boundary in both directions
    within the same interval. State updates must not conflict either.
    """
    moved_by: dict[ElementId, TransferEvent] = {}
    updated: set[ElementId] = set()
    for ev in events:
        _check_event(s, ev)
        for eid in ev.moved:
            if eid in moved_by:
                other = moved_by[eid]
                if {ev.kind, other.kind} == {EXTERNAL_IN, EXTERNAL_OUT}:
                    raise StepError(s.step, f"boundary double-move of element {eid!r}")
                raise StepError(s.step, f"element {eid!r} moved by two events")
            moved_by[eid] = ev
        for eid, _ in ev.state_updates:
            if eid in updated:
                raise StepError(s.step, f"conflicting state updates for {eid!r}")
            updated.add(eid)
    # double-naming is reported before membership so that an in-and-out pair
    # for one element reads as the boundary conflict it is
    for ev in events:
        _check_movers(s, ev)

    membership = dict(s.membership)
    states = dict(s.states)
    for ev in events:
        for eid in ev.moved:
            membership[eid] = ev.to_region
        for eid, update in ev.updates().items():
            new_state = dict(states[eid])
            new_state.update(update)
            states[eid] = new_state

    return Snapshot(
        step=s.step + 1,
        membership=membership,
        region_side=s.region_side,
        states=states,
    )


@dataclass(frozen=True, eq=True)
class Trace:
    """Ordered snapshots plus the per-step events that produced them.

    ``snapshots`` has length n+1 for n steps; ``events[i]`` holds the events
    applied between ``snapshots[i]`` and ``snapshots[i+1]``. ``phases`` labels
    step intervals and ``declarations`` names the structures in play.
    """

    snapshots: tuple[Snapshot, ...]
    events: tuple[tuple[TransferEvent, ...], ...]
    phases: tuple[Phase, ...] = ()
    declarations: tuple[StructureRelation, ...] = ()

    @property
    def n_steps(self) -> int:
        return len(self.snapshots) - 1

    def declaration(self, decl_id: str) -> StructureRelation:
        for decl in self.declarations:
            if decl.id == decl_id:
                return decl
        raise KeyError(decl_id)

    def declarations_by_role(self) -> dict[str, list[StructureRelation]]:
        by_role: dict[str, list[StructureRelation]] = {}
        for decl in self.declarations:
            by_role.setdefault(decl.role, []).append(decl)
        return by_role

    def phase(self, label: str) -> Phase:
        for ph in self.phases:
            if ph.label == label:
                return ph
        raise KeyError(label)


def build_trace(
    initial: Snapshot,
    schedule: list[list[TransferEvent]],
    phases: list[Phase] | tuple[Phase, ...] = (),
    declarations: list[StructureRelation] | tuple[StructureRelation, ...] = (),
) -> Trace:
    """Run a schedule forward from the initial snapshot, validating every step."""
    if initial.step != 0:
        raise ConstructionError("initial snapshot must be at step 0")
    roster = set(initial.membership)
    for decl in declarations:
        for region in decl.scope:
            if region not in initial.region_side:
                raise ConstructionError(
                    f"declaration {decl.id!r} scopes unknown region {region!r}"
                )
        for tup in decl.tuples:
            for eid in tup:
                if eid not in roster:
                    raise ConstructionError(
                        f"declaration {decl.id!r} names unknown element {eid!r}"
                    )
    decl_ids = [d.id for d in declarations]
    if len(set(decl_ids)) != len(decl_ids):
        raise ConstructionError("duplicate declaration ids")
    known = set(decl_ids)

    snapshots = [initial]
    for step_events in schedule:
        for ev in step_events:
            if ev.via_structure is not None and ev.via_structure not in known:
                raise StepError(
                    ev.step, f"event attributed to undeclared structure {ev.via_structure!r}"
                )
        snapshots.append(apply_step(snapshots[-1], list(step_events)))

    n = len(snapshots) - 1
    for ph in phases:
        if not (0 <= ph.start <= ph.stop <= n):
            raise ConstructionError(
                f"phase {ph.label!r} interval [{ph.start}, {ph.stop}) outside 0..{n}"
            )

    return Trace(
        snapshots=tuple(snapshots),
        events=tuple(tuple(evs) for evs in schedule),
        phases=tuple(phases),
        declarations=tuple(declarations),
    )


@dataclass(frozen=True, eq=True)
class ConservationViolation:
    step: int
    kind: str  # "cardinality" or "roster"
    expected: int
    actual: int


def verify_conservation(t: Trace) -> list[ConservationViolation]:
    """Check total cardinality and roster constancy across every step.

    Returns an empty list iff the element-id set is identical in all
    snapshots and the combined system plus environment count never changes.
    Total over any trace, including hand-edited ones.
    """
    violations: list[ConservationViolation] = []
    if not t.snapshots:
        return violations
    base = t.snapshots[0]
    expected_total = len(base.membership)
    roster = set(base.membership)
    for i in range(1, len(t.snapshots)):
        snap = t.snapshots[i]
        total = len(snap.membership)
        if total != expected_total:
            violations.append(
                ConservationViolation(
                    step=i - 1, kind="cardinality", expected=expected_total, actual=total
                )
            )
        elif set(snap.membership) != roster:
            violations.append(
                ConservationViolation(
                    step=i - 1,
                    kind="roster",
                    expected=expected_total,
                    actual=len(roster & set(snap.membership)),
                )
            )
    return violations
