import json
import subprocess
import sys

import pytest

from entassist.harness import (EXIT_DISCREPANCY, EXIT_ERROR, EXIT_OK,
                               OUT_DIR_ENV, RunConfig, collect_rows,
                               full_summary, read_csv_rows, run_experiment)
from entassist.harness.cli import build_parser, config_from_args, main
from entassist.harness.report import format_cell, rows_to_csv
from entassist.harness.verify import verify_exit_code, verify_suite
from entassist.measures import MeasureSpec
from entassist.qcore import RngSeed, random_pure_state, write_state


def run(args, tmp_path):
    return main(list(args) + ["--out", str(tmp_path), "--no-figures"])


def test_kset_writes_reports(tmp_path, capsys):
    code = main(["kset", "--samples", "20", "--out", str(tmp_path)])
    assert code == EXIT_OK
    doc = json.loads((tmp_path / "kset.json").read_text())
    assert doc["header"]["config"]["samples"] == 20
    assert doc["header"]["version"] == "0.1.0"
    assert len(doc["rows"]) == 20
    assert (tmp_path / "kset.csv").exists()
    assert (tmp_path / "kset.png").stat().st_size > 0
    assert doc["figures"] == ["kset.png"]


def test_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["power", "--samples", "15", "--measure", "tsallis", "--q", "2"], a)
    run(["power", "--samples", "15", "--measure", "tsallis:2"], b)
    assert (a / "power.csv").read_bytes() == (b / "power.csv").read_bytes()


def test_seed_changes_rows(tmp_path):
    run(["kset", "--samples", "5", "--seed", "1"], tmp_path / "a")
    run(["kset", "--samples", "5", "--seed", "2"], tmp_path / "b")
    assert (tmp_path / "a" / "kset.csv").read_bytes() != (tmp_path / "b" / "kset.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["kset", "--family", "gsd", "--samples", "30"],
    ["gsd-bound", "--samples", "30"],
    ["polygon", "--samples", "30"],
    ["w-saturation", "--samples", "4"],
    ["power", "--division", "one-to-group", "--samples", "20"],
])
def test_summary_recomputes_from_csv(tmp_path, argv):
    code = run(argv, tmp_path)
    doc = json.loads((tmp_path / f"{argv[0]}.json").read_text())
    rows = read_csv_rows(tmp_path / f"{argv[0]}.csv")
    cfg = config_from_args(build_parser().parse_args(argv))
    from entassist.harness.experiments import prepare
    summary, code2 = full_summary(argv[0], rows, prepare(cfg))
    assert code2 == code == doc["exit_code"]
    assert json.loads(json.dumps(summary)) == doc["summary"]


def test_exit_codes(tmp_path):
    assert run(["kset", "--samples", "5"], tmp_path) == EXIT_OK
    assert run(["gsd-bound", "--samples", "20"], tmp_path) == EXIT_DISCREPANCY
    assert run(["polygon", "--samples", "5"], tmp_path) == EXIT_DISCREPANCY
    assert run(["kset", "--measure", "bogus"], tmp_path) == EXIT_ERROR
    assert run(["kset", "--family", "w", "--constraints", "lambda0_nonzero"],
               tmp_path) == EXIT_ERROR
    assert run(["assist", "--state", str(tmp_path / "missing.json")], tmp_path) == EXIT_ERROR
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_serial_and_parallel_rows_match():
    cfg = RunConfig("kset", samples=12, workers=1)
    serial = collect_rows(cfg)
    parallel = collect_rows(RunConfig("kset", samples=12, workers=3))
    assert rows_to_csv(serial) == rows_to_csv(parallel)


def test_assist_state_file(tmp_path):
    path = tmp_path / "s.json"
    write_state(random_pure_state(3, RngSeed(4)), path)
    code = run(["assist", "--state", str(path), "--keep", "0,2"], tmp_path)
    assert code == EXIT_OK
    rows = read_csv_rows(tmp_path / "assist.csv")
    assert len(rows) == 1 and rows[0]["gap"] <= 1e-3


def test_assist_optimizer_against_oracle(tmp_path):
    code = main(["assist", "--samples", "3", "--ensemble-size", "16",
                 "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert (tmp_path / "assist.png").exists()


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    assert main(["kset", "--samples", "3", "--no-figures"]) == EXIT_OK
    assert (tmp_path / "kset.csv").exists()


def test_sample_defaults():
    assert RunConfig("kset").sample_count == 10_000
    assert RunConfig("kset", measure=MeasureSpec("tsallis", 2)).sample_count == 100
    assert RunConfig("assist").sample_count == 100
    with pytest.raises(ValueError):
        RunConfig("kset", mu=0)
    with pytest.raises(ValueError):
        RunConfig("bogus")


def test_figures_for_every_command(tmp_path):
    for argv in (["power", "--samples", "10"], ["w-saturation", "--samples", "3"],
                 ["polygon", "--samples", "10"], ["gsd-bound", "--samples", "10"]):
        main(argv + ["--out", str(tmp_path)])
        assert (tmp_path / f"{argv[0]}.png").stat().st_size > 0


def test_format_cell():
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(float("nan")) == ""
    assert format_cell(True) == "true"
    assert format_cell({"a": [1, 2]}) == '{"a":[1,2]}'


def test_verify_single_suite(tmp_path, capsys):
    code = main(["verify", "gsd-shortcut-discrepancy", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == EXIT_DISCREPANCY
    assert out.count("[PASS") == 3
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["summary"]["flags"] == 1
    assert main(["verify", "x11-discrepancy", "--out", str(tmp_path)]) == EXIT_DISCREPANCY


def test_verify_exit_code_logic():
    results = verify_suite("gsd-oracle", echo=None)
    assert verify_exit_code(results) == EXIT_OK
    with pytest.raises(ValueError):
        verify_suite("bogus")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "entassist", "kset", "--samples", "2",
                           "--out", str(tmp_path), "--no-figures"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
