"""Command-line behavior: subcommands, windows, exit codes."""

import json
import random
import subprocess
import sys

import pytest

from mindsets import default_mimicry_mapping, write_trace
from mindsets.cli import main

from factories import random_trace


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def small_traces(tmp_path, capsys):
    """One trace per scenario at a quick shared size, via the run command."""
    cfg = tmp_path / "quick.cfg"
    cfg.write_text("trials = 4\ntest_count = 2\n")
    paths = {}
    for name in ("hebbian", "backprop", "aplysia", "sandpile", "off"):
        out = tmp_path / f"{name}.trace"
        code, stdout, _ = run_cli(
            capsys, "run", "--scenario", name, "--config", str(cfg),
            "--steps", "18", "--out", str(out),
        )
        assert code == 0
        assert f"wrote {out}" in stdout
        paths[name] = out
    return paths


def test_run_seed_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "seeded.cfg"
    cfg.write_text("seed = 9\ntrials = 3\ntest_count = 1\n")
    by_config = tmp_path / "a.trace"
    by_flag = tmp_path / "b.trace"
    assert run_cli(capsys, "run", "--scenario", "sandpile", "--config", str(cfg),
                   "--out", str(by_config))[0] == 0
    cfg.write_text("seed = 0\ntrials = 3\ntest_count = 1\n")
    assert run_cli(capsys, "run", "--scenario", "sandpile", "--config", str(cfg),
                   "--seed", "9", "--out", str(by_flag))[0] == 0
    assert by_config.read_bytes() == by_flag.read_bytes()


def test_classify_verdicts_drive_the_exit_code(small_traces, capsys):
    code, out, _ = run_cli(capsys, "classify", "--trace", str(small_traces["hebbian"]))
    assert code == 0
    assert "verdict: true" in out
    code, out, _ = run_cli(capsys, "classify", "--trace", str(small_traces["off"]))
    assert code == 1
    assert "verdict: false" in out


def test_classify_windows(small_traces, capsys):
    trace = str(small_traces["aplysia"])
    code, out, _ = run_cli(capsys, "classify", "--trace", trace, "--window", "0:3")
    assert code == 0 and "window: 0:3" in out
    # the middle step of a trial moves nothing across the boundary
    code, out, _ = run_cli(capsys, "classify", "--trace", trace, "--window", "1:2")
    assert code == 1
    code, _, err = run_cli(capsys, "classify", "--trace", trace, "--window", "5:5")
    assert code == 2 and "empty window" in err
    code, _, err = run_cli(capsys, "classify", "--trace", trace, "--window", "0:999")
    assert code == 2 and "outside steps" in err
    code, _, _ = run_cli(capsys, "classify", "--trace", trace, "--window", "nope")
    assert code == 2


def test_bad_inputs_exit_three(tmp_path, capsys):
    code, _, err = run_cli(capsys, "classify", "--trace", str(tmp_path / "none.trace"))
    assert code == 3 and "error:" in err
    garbage = tmp_path / "garbage.trace"
    garbage.write_text("not a trace\n")
    assert run_cli(capsys, "classify", "--trace", str(garbage))[0] == 3
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("speed = 9\n")
    code, _, err = run_cli(capsys, "run", "--scenario", "off", "--config", str(cfg),
                           "--out", str(tmp_path / "x.trace"))
    assert code == 3 and "unknown config key" in err


def test_usage_errors_exit_two(capsys):
    assert run_cli(capsys, "run", "--scenario", "psychic", "--out", "x")[0] == 2
    assert run_cli(capsys, "explain")[0] == 2
    assert run_cli(capsys)[0] == 2


def test_activity_modes(small_traces, capsys):
    code, out, _ = run_cli(capsys, "activity", "--trace", str(small_traces["off"]))
    assert code == 0
    assert "step_activity: 0.0" in out
    code, out, _ = run_cli(
        capsys, "activity", "--trace", str(small_traces["hebbian"]),
        "--mode", "element", "--window", "0:6",
    )
    assert code == 0
    assert "reported metric: element_rate" in out


def test_functor_check_passes_on_generated_traces(small_traces, capsys):
    code, out, _ = run_cli(capsys, "functor-check", "--trace", str(small_traces["sandpile"]))
    assert code == 0
    assert "all laws hold" in out


def test_mimic_check_accepts_the_shipped_mapping(small_traces, tmp_path, capsys):
    mapping = tmp_path / "map.json"
    mapping.write_text(json.dumps(default_mimicry_mapping()))
    code, out, _ = run_cli(
        capsys, "mimic-check",
        "--source", str(small_traces["aplysia"]),
        "--target", str(small_traces["hebbian"]),
        "--map", str(mapping),
    )
    assert code == 0
    assert "all laws hold" in out


def test_mimic_check_rejects_a_corrupted_mapping(small_traces, tmp_path, capsys):
    data = default_mimicry_mapping()
    data["components"]["output"] = [[["gill"], ["ghost"]]]
    mapping = tmp_path / "broken.json"
    mapping.write_text(json.dumps(data))
    code, out, _ = run_cli(
        capsys, "mimic-check",
        "--source", str(small_traces["aplysia"]),
        "--target", str(small_traces["hebbian"]),
        "--map", str(mapping),
    )
    assert code == 1
    assert "mapping rejected" in out
    assert "counterexample" in out


def test_oracle_check_agrees_on_small_traces(tmp_path, capsys):
    t = random_trace(random.Random(11))
    path = tmp_path / "small.trace"
    write_trace(t, path)
    code, out, _ = run_cli(capsys, "oracle-check", "--trace", str(path))
    assert code == 0
    assert "agreement: yes" in out


def test_oracle_check_respects_the_size_guard(small_traces, capsys):
    code, _, err = run_cli(capsys, "oracle-check", "--trace", str(small_traces["hebbian"]))
    assert code == 3
    assert "size guard" in err


def test_report_renders_phases(small_traces, capsys):
    code, out, _ = run_cli(capsys, "report", "--trace", str(small_traces["backprop"]),
                           "--format", "md")
    assert code == 0
    assert "| learning | 0:20 | [input -> processing -> output -> input -> processing] x 4 |" in out
    assert "| test | 20:26 | [input -> processing -> output] x 2 |" in out


def test_console_entry_point_round_trips(tmp_path):
    out = tmp_path / "cli.trace"
    first = subprocess.run(
        [sys.executable, "-m", "mindsets.cli", "run", "--scenario", "off",
         "--steps", "5", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert first.returncode == 0
    second = subprocess.run(
        [sys.executable, "-m", "mindsets.cli", "classify", "--trace", str(out)],
        capture_output=True, text=True,
    )
    assert second.returncode == 1
    assert "verdict: false" in second.stdout
