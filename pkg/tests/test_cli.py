"""Command-line interface tests."""
import hashlib
import json

import pytest

from fdbackhaul.cli import main
from fdbackhaul.scenario import GenParams, generate, save_scenario

FAST = [
    "--bs", "6", "--flows", "6", "--slots", "100", "--trials", "2",
    "--qos-low-gbps", "0.2", "--qos-high-gbps", "1.0",
]


def test_help_shows_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep-flows", "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "[us]" in out and "[Gbps]" in out and "[dBm/MHz]" in out
    assert "default: 18.0" in out  # slot duration
    assert "default: 2000" in out  # slots per frame
    assert "default: -134.0" in out  # noise PSD


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["sweep-flows", "--bogus-flag"])
    assert exc.value.code == 2


def test_empty_scheduler_list_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--schedulers", "", "--out", str(tmp_path / "x.json")] + FAST)
    assert exc.value.code == 2
    assert not (tmp_path / "x.json").exists()


def test_unknown_scheduler_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--schedulers", "warp-drive"] + FAST)
    assert exc.value.code == 2


def test_run_reports_all_schedulers(capsys):
    assert main(["run", "--seed", "3"] + FAST) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"tdma", "mqis", "proposed-hd", "proposed-fd", "fdp"}
    for entry in report.values():
        assert set(entry) == {"completed", "throughput_gbps"}


def test_run_save_and_reuse_scenario(tmp_path, capsys):
    saved = tmp_path / "scenario.json"
    assert main(["run", "--seed", "4", "--save-scenario", str(saved)] + FAST) == 0
    first = capsys.readouterr().out
    digest = hashlib.sha256(saved.read_bytes()).hexdigest()
    assert main(["run", "--scenario", str(saved), "--schedulers", "tdma,mqis"]) == 0
    second = json.loads(capsys.readouterr().out)
    assert set(second) == {"tdma", "mqis"}
    full = json.loads(first)
    assert second["tdma"] == full["tdma"]
    # Input file untouched.
    assert hashlib.sha256(saved.read_bytes()).hexdigest() == digest


def test_validate_command(tmp_path, capsys):
    good = tmp_path / "good.json"
    save_scenario(generate(5, GenParams(num_flows=4)), good)
    assert main(["validate", str(good)]) == 0
    assert capsys.readouterr().out.strip() == "ok"

    bad = tmp_path / "bad.json"
    data = json.loads(good.read_text())
    data["flows"][0]["rx"] = data["flows"][0]["tx"]
    bad.write_text(json.dumps(data))
    assert main(["validate", str(bad)]) == 1
    assert "self-flow" in capsys.readouterr().out


def test_sweep_files_and_determinism(tmp_path):
    args = [
        "sweep-flows", "--values", "3,5", "--seed", "9", "--workers", "1",
        "--out", str(tmp_path / "first"),
    ] + FAST
    assert main(args) == 0
    r1 = (tmp_path / "first_results.csv").read_bytes()
    a1 = (tmp_path / "first_aggregate.csv").read_bytes()
    assert r1.startswith(b"scheduler,axis,axis_value,trial,seed,completed,throughput_gbps")
    assert a1.startswith(
        b"scheduler,axis_value,mean_completed,std_completed,"
        b"mean_throughput_gbps,std_throughput_gbps"
    )
    args2 = [
        "sweep-flows", "--values", "3,5", "--seed", "9", "--workers", "2",
        "--out", str(tmp_path / "second"),
    ] + FAST
    assert main(args2) == 0
    assert (tmp_path / "second_results.csv").read_bytes() == r1
    assert (tmp_path / "second_aggregate.csv").read_bytes() == a1


def test_sweep_json_format(tmp_path):
    args = [
        "sweep-sigma", "--magnitudes", "-3,-2", "--seed", "2", "--workers", "1",
        "--format", "json", "--out", str(tmp_path / "s"),
    ] + FAST
    assert main(args) == 0
    rows = json.loads((tmp_path / "s_results.json").read_text())
    assert len(rows) == 2 * 2 * 5
    aggs = json.loads((tmp_path / "s_aggregate.json").read_text())
    assert {a["axis_value"] for a in aggs} == {-3, -2}


def test_outdir_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("FDBACKHAUL_OUTDIR", str(tmp_path / "results"))
    args = ["sweep-beta", "--magnitudes", "0", "--seed", "1", "--workers", "1",
            "--schedulers", "tdma"] + FAST
    assert main(args) == 0
    assert (tmp_path / "results" / "sweep_beta_results.csv").exists()


def test_io_failure_exit_code(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    args = ["sweep-flows", "--values", "3", "--seed", "1", "--workers", "1",
            "--out", str(blocker / "x")] + FAST
    assert main(args) == 1


def test_oracle_command(tmp_path, capsys):
    args = [
        "oracle", "--seed", "8", "--bs", "4", "--flows", "3", "--slots", "4",
        "--qos-low-gbps", "4", "--qos-high-gbps", "8",
    ]
    assert main(args) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"optimal_completed", "allocation"}
    assert 0 <= report["optimal_completed"] <= 3


def test_oracle_refuses_big_instances(capsys):
    assert main(["oracle", "--seed", "1", "--flows", "12"]) == 1
    assert "error" in capsys.readouterr().err
