"""Transfer events, step application, trace construction, conservation."""

import random

import pytest

from mindsets import (
    EXTERNAL_IN,
    EXTERNAL_OUT,
    INTERNAL,
    ConstructionError,
    Phase,
    StepError,
    StructureRelation,
    TransferEvent,
    apply_step,
    build_trace,
    verify_conservation,
)

from factories import random_trace, two_region_snapshot


def event(step=0, kind=EXTERNAL_IN, moved=("b",), src="out", dst="in", **kw):
    return TransferEvent.make(
        step=step, kind=kind, moved=frozenset(moved), from_region=src, to_region=dst, **kw
    )


def test_make_packs_state_updates_deterministically():
    e1 = event(state_updates={"a": {"w": 1, "v": 2}, "b": {"x": 0}})
    e2 = event(state_updates={"b": {"x": 0}, "a": {"v": 2, "w": 1}})
    assert e1 == e2
    assert e1.updates() == {"a": {"w": 1, "v": 2}, "b": {"x": 0}}


def test_events_are_hashable():
    assert len({event(), event()}) == 1


def test_apply_step_moves_and_advances():
    s0 = two_region_snapshot(system_members=("a",), env_members=("b", "c"))
    s1 = apply_step(s0, [event(moved=("b", "c"))])
    assert s1.step == 1
    assert s1.members("in") == {"a", "b", "c"}
    assert s1.members("out") == set()
    # the old snapshot is untouched
    assert s0.members("in") == {"a"}


def test_apply_step_merges_states():
    s0 = two_region_snapshot()
    s1 = apply_step(
        s0, [event(state_updates={"a": {"w": 0.5}, "b": {"seen": 1}})]
    )
    assert s1.states["a"] == {"w": 0.5}
    assert s1.states["b"] == {"seen": 1}
    s2 = apply_step(s1, [event(step=1, kind=EXTERNAL_OUT, moved=("b",), src="in", dst="out",
                               state_updates={"a": {"w": 0.25, "bias": 1.0}})])
    # merge keeps unrelated keys, overwrites named ones
    assert s2.states["a"] == {"w": 0.25, "bias": 1.0}


def test_empty_step_only_advances_the_clock():
    s0 = two_region_snapshot()
    s1 = apply_step(s0, [])
    assert s1.step == 1
    assert s1.membership == s0.membership


@pytest.mark.parametrize(
    "kw, message",
    [
        (dict(moved=()), "moves no elements"),
        (dict(kind="teleport"), "unknown event kind"),
        (dict(src="nowhere"), "unknown region"),
        (dict(src="in", dst="in", moved=("a",)), "moves nothing across regions"),
        (dict(kind=INTERNAL, src="out", dst="in"), "internal event connects"),
        (dict(kind=EXTERNAL_OUT, src="out", dst="in"), "external_out event connects"),
        (dict(moved=("a",)), "is in 'in', not 'out'"),
        (dict(state_updates={"ghost": {"v": 1}}), "unknown element"),
    ],
)
def test_apply_step_rejects_malformed_events(kw, message):
    s0 = two_region_snapshot()
    with pytest.raises(StepError, match=message):
        apply_step(s0, [event(**kw)])


def test_apply_step_rejects_wrong_step_index():
    s0 = two_region_snapshot()
    with pytest.raises(StepError, match="step 0"):
        apply_step(s0, [event(step=3)])


def test_double_move_is_rejected():
    s0 = two_region_snapshot(system_members=("a",), env_members=("b", "c"))
    both = [event(moved=("b",)), event(moved=("b", "c"))]
    with pytest.raises(StepError, match="moved by two events"):
        apply_step(s0, both)


def test_boundary_double_move_gets_its_own_message():
    # one element scheduled both inward and outward in a single interval
    s0 = two_region_snapshot(system_members=("a",), env_members=("b",))
    pair = [
        event(moved=("b",)),
        event(kind=EXTERNAL_OUT, moved=("b",), src="in", dst="out"),
    ]
    with pytest.raises(StepError, match="boundary double-move"):
        apply_step(s0, pair)


def test_conflicting_state_updates_rejected():
    s0 = two_region_snapshot(system_members=("a", "x"), env_members=("b", "c"))
    pair = [
        event(moved=("b",), state_updates={"a": {"v": 1}}),
        event(kind=EXTERNAL_OUT, moved=("x",), src="in", dst="out",
              state_updates={"a": {"v": 2}}),
    ]
    with pytest.raises(StepError, match="conflicting state updates"):
        apply_step(s0, pair)


def test_step_error_carries_the_step():
    s0 = two_region_snapshot()
    try:
        apply_step(s0, [event(moved=("a",))])
    except StepError as exc:
        assert exc.step == 0
        assert str(exc).startswith("step 0:")
    else:
        pytest.fail("expected StepError")


def test_build_trace_replays_schedule():
    s0 = two_region_snapshot(system_members=("a",), env_members=("b", "c"))
    t = build_trace(
        s0,
        [
            [event(moved=("b",))],
            [event(step=1, kind=EXTERNAL_OUT, moved=("a",), src="in", dst="out")],
        ],
    )
    assert t.n_steps == 2
    assert len(t.snapshots) == 3
    assert t.snapshots[2].members("in") == {"b"}
    assert [s.step for s in t.snapshots] == [0, 1, 2]


def test_build_trace_validates_declarations():
    s0 = two_region_snapshot()
    good = StructureRelation(
        id="d", role="input", arity=1, tuples=frozenset({("a",)}), scope=frozenset({"in"})
    )
    t = build_trace(s0, [], declarations=[good])
    assert t.declaration("d") is good
    assert t.declarations_by_role()["input"] == [good]

    with pytest.raises(ConstructionError, match="unknown region"):
        build_trace(s0, [], declarations=[
            StructureRelation(id="d", role="input", arity=1,
                              tuples=frozenset(), scope=frozenset({"nowhere"}))
        ])
    with pytest.raises(ConstructionError, match="unknown element"):
        build_trace(s0, [], declarations=[
            StructureRelation(id="d", role="input", arity=1,
                              tuples=frozenset({("ghost",)}), scope=frozenset({"in"}))
        ])
    with pytest.raises(ConstructionError, match="duplicate"):
        build_trace(s0, [], declarations=[good, good])


def test_build_trace_checks_via_structure_is_declared():
    s0 = two_region_snapshot()
    with pytest.raises(ConstructionError, match="undeclared structure"):
        build_trace(s0, [[event(via_structure="ghost")]])


def test_build_trace_checks_phase_bounds():
    s0 = two_region_snapshot()
    t = build_trace(s0, [[event()]], phases=[Phase("all", 0, 1)])
    assert t.phase("all") == Phase("all", 0, 1)
    with pytest.raises(ConstructionError, match="phase"):
        build_trace(s0, [[event()]], phases=[Phase("long", 0, 5)])
    with pytest.raises(ConstructionError, match="phase"):
        build_trace(s0, [[event()]], phases=[Phase("backwards", 1, 0)])
    with pytest.raises(KeyError):
        t.phase("missing")


def test_build_trace_requires_step_zero_start():
    s0 = two_region_snapshot()
    s1 = apply_step(s0, [])
    with pytest.raises(ConstructionError, match="step 0"):
        build_trace(s1, [])


def test_conservation_holds_on_random_traces():
    for seed in range(60):
        t = random_trace(random.Random(seed), with_metadata=seed % 3 == 0)
        assert verify_conservation(t) == []


def _retouch_last_snapshot(t, rewrite):
    snaps = list(t.snapshots)
    last = snaps[-1]
    membership = rewrite(dict(last.membership))
    snaps[-1] = type(last)(
        step=last.step,
        membership=membership,
        region_side=dict(last.region_side),
        states={e: last.states.get(e, {}) for e in membership},
    )
    return type(t)(
        snapshots=tuple(snaps),
        events=t.events,
        phases=t.phases,
        declarations=t.declarations,
    )


def test_conservation_flags_a_lost_element():
    t = random_trace(random.Random(1))

    def drop_one(membership):
        membership.pop(sorted(membership)[0])
        return membership

    violations = verify_conservation(_retouch_last_snapshot(t, drop_one))
    assert violations == [
        type(violations[0])(
            step=t.n_steps - 1,
            kind="cardinality",
            expected=len(t.snapshots[0].membership),
            actual=len(t.snapshots[0].membership) - 1,
        )
    ]


def test_conservation_flags_a_swapped_identity():
    # same count, different ids: the roster check catches it
    t = random_trace(random.Random(2))

    def rename_one(membership):
        victim = sorted(membership)[0]
        membership["impostor"] = membership.pop(victim)
        return membership

    violations = verify_conservation(_retouch_last_snapshot(t, rename_one))
    assert [v.kind for v in violations] == ["roster"]
    assert violations[0].step == t.n_steps - 1
