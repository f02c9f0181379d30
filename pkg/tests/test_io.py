"""Trace files, config and mapping files, and markdown reports."""

import json
import random

import pytest

from mindsets import (
    ConfigError,
    ScenarioConfig,
    TraceFormatError,
    MappingFormatError,
    make_scenario,
    brute_force_classify,
    check_functor_laws,
    classify,
    activity,
    default_mimicry_mapping,
    functor_from_trace,
    load_config,
    load_mapping,
    mapping_components,
    mapping_object_map,
    parse_window,
    read_trace,
    render_report,
    trace_to_text,
    write_trace,
)

from factories import random_trace

SMALL = ScenarioConfig(seed=1, trials=4, test_count=2)


def round_trip(t, path):
    write_trace(t, path)
    back = read_trace(path)
    assert back == t
    assert trace_to_text(back) == path.read_text()
    return back


@pytest.mark.parametrize("name", ["hebbian", "backprop", "aplysia", "sandpile", "off"])
def test_scenario_traces_round_trip(name, tmp_path):
    bundle = make_scenario(name, SMALL, steps=6)
    round_trip(bundle.trace, tmp_path / f"{name}.trace")


def test_random_traces_round_trip(tmp_path):
    for seed in range(40):
        t = random_trace(random.Random(seed), with_metadata=True)
        round_trip(t, tmp_path / f"r{seed}.trace")


def test_stepless_trace_round_trips(tmp_path):
    bundle = make_scenario("off", SMALL, steps=1)
    t = type(bundle.trace)(
        snapshots=bundle.trace.snapshots[:1],
        events=(),
        phases=(),
        declarations=bundle.trace.declarations,
    )
    back = round_trip(t, tmp_path / "empty.trace")
    assert back.n_steps == 0


def test_header_names_the_format():
    t = make_scenario("off", SMALL, steps=1).trace
    header = json.loads(trace_to_text(t).splitlines()[0])
    assert header["format"] == "mindsets-trace"
    assert header["version"] == 1
    assert [r for r, _ in header["regions"]] == sorted(r for r, _ in header["regions"])


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


def test_read_trace_error_catalog(tmp_path):
    good = trace_to_text(make_scenario("off", SMALL, steps=2).trace).splitlines()

    cases = [
        (["{not json"], "line 1: invalid JSON"),
        (['{"format":"something-else"}'], "line 1: not a trace file"),
        (['{"format":"mindsets-trace","version":9}'], "unsupported format version"),
        ([good[0].replace('"regions"', '"territories"')], "malformed header"),
        (good[:1] + [good[2].replace('"step":1', '"step":5')], "line 2: expected step"),
        (good[:2] + ["[1,2,3]"], "line 3: expected an object"),
        (
            good[:1] + ['{"step":0,"events":[{"kind":"external_in"}]}'],
            "line 2: malformed event",
        ),
    ]
    for lines, message in cases:
        path = write_lines(tmp_path / "bad.trace", lines)
        with pytest.raises(TraceFormatError, match=message):
            read_trace(path)

    (tmp_path / "void.trace").write_text("")
    with pytest.raises(TraceFormatError, match="empty trace file"):
        read_trace(tmp_path / "void.trace")
    with pytest.raises(OSError):
        read_trace(tmp_path / "does-not-exist.trace")


def test_read_trace_replays_through_validation(tmp_path):
    # a well-formed file describing an impossible move still fails, with
    # the step named by the shared construction path
    t = make_scenario("aplysia", SMALL).trace
    lines = trace_to_text(t).splitlines()
    tampered = lines[1].replace('"moved":["stim_0"]', '"moved":["stim_3"]')
    assert tampered != lines[1]
    path = write_lines(tmp_path / "impossible.trace", [lines[0], tampered] + lines[2:])
    # stim_3 arrives early without complaint; the replay then breaks at
    # step 1, where the original schedule forwards the absent stim_0
    with pytest.raises(Exception, match="step 1: element 'stim_0'"):
        read_trace(path)


def test_parse_window():
    assert parse_window("0:30") == (0, 30)
    assert parse_window("-1:2") == (-1, 2)
    with pytest.raises(ValueError, match="A:B"):
        parse_window("0-30")
    with pytest.raises(ValueError, match="integers"):
        parse_window("a:b")


def test_load_config_parses_typed_fields(tmp_path):
    path = write_lines(
        tmp_path / "scenario.cfg",
        [
            "# quick run",
            "",
            "seed = 42",
            "trials=5",
            "learning_rate = 0.25",
            "aplysia_stimuli = weak",
        ],
    )
    cfg = load_config(path)
    assert cfg.seed == 42
    assert cfg.trials == 5
    assert cfg.learning_rate == 0.25
    assert cfg.aplysia_stimuli == "weak"
    # untouched fields keep their defaults
    assert cfg.pattern_size == ScenarioConfig().pattern_size


@pytest.mark.parametrize(
    "line, message",
    [
        ("speed = 9", "line 1: unknown config key"),
        ("trials = many", "line 1: bad value for 'trials'"),
        ("trials 9", "line 1: expected key=value"),
    ],
)
def test_load_config_rejects_bad_lines(tmp_path, line, message):
    path = write_lines(tmp_path / "bad.cfg", [line])
    with pytest.raises(ConfigError, match=message):
        load_config(path)


def test_shipped_mapping_loads():
    data = default_mimicry_mapping()
    assert data["format"] == "mindsets-mimicry"
    components = mapping_components(data)
    assert set(components) == {"input", "processing", "output"}
    assert components["output"][("gill",)] == ("judge",)
    assert mapping_object_map(data, 4) == (0, 1, 2, 3)


def test_mapping_file_validation(tmp_path):
    good = default_mimicry_mapping()

    def dump(data):
        path = tmp_path / "map.json"
        path.write_text(json.dumps(data))
        return path

    assert load_mapping(dump(good))["object_map"] == "identity"

    with pytest.raises(MappingFormatError, match="not a mimicry mapping"):
        load_mapping(dump({**good, "format": "recipe"}))
    with pytest.raises(MappingFormatError, match="unsupported mapping version"):
        load_mapping(dump({**good, "version": 3}))
    with pytest.raises(MappingFormatError, match="components table"):
        load_mapping(dump({k: v for k, v in good.items() if k != "components"}))
    with pytest.raises(MappingFormatError, match="object_map"):
        load_mapping(dump({**good, "object_map": 7}))
    (tmp_path / "map.json").write_text("{broken")
    with pytest.raises(MappingFormatError, match="invalid JSON"):
        load_mapping(tmp_path / "map.json")


def test_explicit_object_maps():
    data = {**default_mimicry_mapping(), "object_map": [[0, 0], [1, 2], [2, 4]]}
    assert mapping_object_map(data, 3) == (0, 2, 4)
    with pytest.raises(MappingFormatError, match="misses source objects"):
        mapping_object_map(data, 4)
    with pytest.raises(MappingFormatError, match="int, int"):
        mapping_object_map({**data, "object_map": [["a", "b"]]}, 1)


def test_mapping_components_shape_errors():
    with pytest.raises(MappingFormatError, match="component map for 'input'"):
        mapping_components({"components": {"input": 5}})


def test_render_classification_report():
    t = make_scenario("hebbian", SMALL).trace
    doc = render_report(classify(t, (0, t.n_steps)))
    assert doc.kind == "classification"
    assert "verdict: true" in doc.body
    assert "| input | yes |" in doc.body
    # step sets render as run ranges
    assert "-" in doc.body


def test_render_activity_report():
    t = make_scenario("off", SMALL, steps=4).trace
    doc = render_report(activity(t, (0, 4), mode="element"))
    assert doc.kind == "activity"
    assert "step_activity: 0.0" in doc.body
    assert "reported metric: element_rate" in doc.body


def test_render_law_report():
    f = functor_from_trace(make_scenario("aplysia", SMALL).trace)
    doc = render_report(check_functor_laws(f))
    assert doc.kind == "law"
    assert "result: all laws hold" in doc.body


def test_render_oracle_report():
    t = random_trace(random.Random(3))
    window = (0, t.n_steps)
    doc = render_report((classify(t, window), brute_force_classify(t, window)))
    assert doc.kind == "oracle"
    assert "agreement: yes" in doc.body


def test_render_scenario_and_trace_tables():
    bundle = make_scenario("hebbian", SMALL)
    doc = render_report(bundle)
    assert doc.kind == "table"
    assert "test accuracy:" in doc.body
    assert "[input -> processing -> output] x 4" in doc.body
    bare = render_report(bundle.trace)
    assert bare.kind == "table"
    assert "test accuracy:" not in bare.body


def test_render_rejects_unknown_subjects():
    with pytest.raises(Exception, match="cannot render"):
        render_report(42)
