import io
import json

import pytest

from tsrules.cli import run_cli


@pytest.fixture(scope="module")
def switch_log(tmp_path_factory):
    """Synthetic switch -> lights log (plus default habits) written once for the module."""
    d = tmp_path_factory.mktemp("switch")
    habits = d / "habits.json"
    habits.write_text(
        json.dumps(
            [
                {"steps": ["bedroom switch top right: ON", "bedroom light 1: 0", "bedroom light 2: 0"], "delays": [300, 100], "repetitions": 30, "jitter": 50},
                {"steps": ["door: OPEN", "hall light: 100"], "delays": [800], "repetitions": 25, "jitter": 200},
            ]
        )
    )
    log = d / "log.csv"
    truth = d / "truth.json"
    assert run_cli(["synth", "--habits", str(habits), "--length", "3000", "--seed", "3", "--window", "2s", "-o", str(log), "--truth", str(truth)]) == 0
    actuators = d / "actuators.txt"
    actuators.write_text("bedroom light *\nhall light\n")
    return d, log, truth, actuators


def _rules(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_mine_finds_switch_rule(switch_log, tmp_path):
    d, log, truth, actuators = switch_log
    out, stats = tmp_path / "rules.jsonl", tmp_path / "stats.json"
    code = run_cli(["mine", str(log), "--window", "2s", "--min-sup", "20", "--min-int", "0.9", "--measure", "netconf",
                    "--predict-only", str(actuators), "-o", str(out), "--stats", str(stats)])
    assert code == 0
    rules = _rules(out)
    keys = {(tuple(map(tuple, r["condition"])), tuple(map(tuple, r["prediction"]))) for r in rules}
    assert ((("bedroom switch top right: ON", 1),), (("bedroom light 1: 0", 1), ("bedroom light 2: 0", 1))) in keys
    for r in rules:
        assert set(r) == {"condition", "prediction", "support", "rel_support", "interest", "window_ms"}
        assert r["window_ms"] == 2000
        assert all(item.startswith(("bedroom light", "hall light")) for item, _ in r["prediction"])
    s = json.loads(stats.read_text())
    assert s["rule_count"] == len(rules) and "elapsed_ms" in s and "mean_interest" in s


def test_mine_output_deterministic(switch_log, tmp_path):
    _, log, _, _ = switch_log
    outs = []
    for k in range(2):
        buf = io.StringIO()
        assert run_cli(["mine", str(log), "--window", "1500ms", "--min-sup", "20", "--max-condition", "2"], out=buf) == 0
        outs.append(buf.getvalue())
    assert outs[0] == outs[1] and outs[0]


def test_synth_truth_file(switch_log):
    _, _, truth, _ = switch_log
    data = json.loads(truth.read_text())
    assert data[0]["condition"] == [["bedroom switch top right: ON", 1]]
    assert data[0]["support"] == 30 and data[0]["recoverable"]


@pytest.mark.parametrize(
    "argv",
    [
        ["mine", "LOG", "--window", "2s", "--min-sup", "0"],
        ["mine", "LOG", "--window", "2 weeks"],
        ["mine", "LOG", "--window", "2s", "--min-int", "3"],
        ["mine", "LOG", "--window", "2s", "--bogus"],
        ["mine", "LOG"],
        ["mine", "LOG", "--window", "2s", "--predict-only", "/nonexistent/actuators.txt"],
    ],
)
def test_config_errors_exit_2(switch_log, argv):
    _, log, _, _ = switch_log
    assert run_cli([str(log) if a == "LOG" else a for a in argv]) == 2


def test_data_errors_exit_1(tmp_path):
    assert run_cli(["mine", str(tmp_path / "missing.csv"), "--window", "2s"]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("garbage\nmore garbage\n")
    assert run_cli(["mine", str(bad), "--window", "2s"]) == 1


def test_baseline_builtin():
    buf = io.StringIO()
    assert run_cli(["baseline"], out=buf) == 0
    rep = json.loads(buf.getvalue())
    assert rep["tr_confidence"] == 1.0 and rep["ts_confidence"] == 0.25


def test_baseline_on_file(tmp_path):
    log = tmp_path / "e.jsonl"
    log.write_text("".join(json.dumps({"timestamp": t, "source": "s", "value": v}) + "\n" for t, v in [(0, "a"), (1000, "b"), (9000, "a")]))
    buf = io.StringIO()
    assert run_cli(["baseline", str(log), "--condition", "s: a", "--prediction", "s: b", "--delta-tr", "5s"], out=buf) == 0
    assert json.loads(buf.getvalue())["ts_sup_rule"] == 1
    assert run_cli(["baseline", str(log)]) == 2


def test_discretize_flag(tmp_path):
    log = tmp_path / "t.csv"
    rows = ["timestamp,source,value"]
    for k in range(25):
        base = k * 60_000
        rows += [f"{base},temp,{19.2 + (k % 2) * 0.3}", f"{base + 500},heater,ON", f"{base + 30_000},temp,23.1"]
    log.write_text("\n".join(rows) + "\n")
    spec = tmp_path / "bins.json"
    spec.write_text(json.dumps({"temp": {"width": 1}}))
    buf = io.StringIO()
    assert run_cli(["mine", str(log), "--window", "1s", "--min-sup", "20", "--discretize", str(spec)], out=buf) == 0
    keys = [(r["condition"], r["prediction"]) for r in map(json.loads, buf.getvalue().splitlines())]
    assert ([["temp: [19,20)", 1]], [["heater: ON", 1]]) in keys


def test_stats_over_windows(switch_log, tmp_path):
    _, log, _, _ = switch_log
    files = []
    for w in ("1s", "2s", "5s", "10s"):
        f = tmp_path / f"rules_{w}.jsonl"
        assert run_cli(["mine", str(log), "--window", w, "--min-sup", "20", "--max-condition", "3", "--max-prediction", "3", "-o", str(f)]) == 0
        files.append(str(f))
    buf = io.StringIO()
    assert run_cli(["stats", *reversed(files)], out=buf) == 0
    summary = json.loads(buf.getvalue())
    assert [s["window_ms"] for s in summary["files"]] == [1000, 2000, 5000, 10_000]
    counts = [s["rule_count"] for s in summary["files"]]
    assert counts == sorted(counts)
    assert summary["rule_count_non_decreasing_with_window"]


def test_stats_unreadable(tmp_path):
    assert run_cli(["stats", str(tmp_path / "nope.jsonl")]) == 1
