from __future__ import annotations

import json
import subprocess
import sys

import pytest

from flowgen.cli import main

import helpers

SHORT = ["--start", "2024-01-01", "--end", "2024-01-07"]


def _files(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def test_generate_short_range(tmp_path, capsys):
    assert main(["generate", "--users", "2", *SHORT, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr()
    summary = json.loads(out.out)
    assert summary["row_counts"]["daily_logs.csv"] == 14
    assert summary["row_counts"]["daily_all.csv"] == 14
    assert "wall_time_s" in summary
    assert "chunk 1/1" in out.err
    assert len((tmp_path / "daily_logs.csv").read_text().splitlines()) == 15


def test_same_flags_same_bytes(tmp_path):
    for d in ("a", "b"):
        assert main(["generate", "--users", "10", "--seed", "1", "--quiet", "--out", str(tmp_path / d)]) == 0
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_no_denormalized(tmp_path):
    assert main(["generate", "--users", "2", *SHORT, "--no-denormalized", "--quiet", "--out", str(tmp_path)]) == 0
    assert not (tmp_path / "daily_all.csv").exists()
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert "daily_all.csv" not in manifest["row_counts"]


def test_seed_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"seed": 3}')
    monkeypatch.setenv("FLOW_SEED", "5")
    args = ["generate", "--config", str(cfg), "--users", "1", *SHORT, "--quiet"]
    assert main([*args, "--out", str(tmp_path / "env")]) == 0
    assert json.loads((tmp_path / "env" / "manifest.json").read_text())["seed"] == 5
    assert main([*args, "--seed", "6", "--out", str(tmp_path / "flag")]) == 0
    assert json.loads((tmp_path / "flag" / "manifest.json").read_text())["seed"] == 6


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "--users", "0"],
        ["generate", "--start", "2024-02-30"],
        ["generate", "--bogus"],
        ["validate"],
        [],
    ],
)
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"population_size": -3}')
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "population_size" in capsys.readouterr().err
    assert main(["generate", "--start", "2024-05-01", "--end", "2024-01-01", "--out", str(tmp_path / "o")]) == 2
    assert main(["generate", "--config", str(tmp_path / "missing.json")]) == 2


def test_write_failure_exits_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--users", "1", *SHORT, "--quiet", "--out", str(blocker)]) == 1


def test_validate_exit_codes(small_dir, tmp_path, capsys):
    assert main(["validate", "--dir", str(small_dir), "--report", str(tmp_path / "r.json")]) == 0
    assert json.loads((tmp_path / "r.json").read_text())["overall_pass"] is True
    assert "overall: PASS" in capsys.readouterr().out

    bad = helpers.copy_dataset(small_dir, tmp_path / "bad")
    helpers.out_of_range_cell(bad)
    assert main(["validate", "--dir", str(bad)]) == 1
    assert (bad / "validation_report.json").exists()

    gone = helpers.copy_dataset(small_dir, tmp_path / "gone")
    (gone / "weekly_summaries.csv").unlink()
    capsys.readouterr()
    assert main(["validate", "--dir", str(gone)]) == 1
    assert "weekly_summaries.csv" in capsys.readouterr().err


def test_threshold_flag(small_dir, tmp_path):
    argv = ["validate", "--dir", str(small_dir), "--report", str(tmp_path / "r.json")]
    assert main([*argv, "--min-corr-exercise-mood", "0.99"]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "flowgen", "generate", "--users", "1", *SHORT, "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["row_counts"]["users.csv"] == 1
