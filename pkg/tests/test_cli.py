import json

import pytest

from src.cli import main, parse_run_config, series_table
from src.sampling import PathSpec, RandomStream, fbm_path, sample_fgn
from src.series import SeriesKind, SeriesTag
from src.storage.reports import REPORT_COLUMNS, SERIES_COLUMNS


def test_constants_prints_json(cache_dir, capsys):
    assert main(["constants", "--q", "2", "--hurst", "0.5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["c1"] == pytest.approx(1.4142135623730951, abs=1e-8)
    assert payload["certified_error"] <= 1e-8
    assert payload["regime"] == "CLT"


def test_simulate_writes_path_and_sidecar(tmp_path, cache_dir):
    out = tmp_path / "path.csv"
    assert main(["simulate", "--hurst", "0.5", "--n", "4", "--seed", "7", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,t,B_t,increment_std"
    assert lines[1].split(",")[:3] == ["0", "0.0", "0.0"]
    assert len(lines) == 6
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["seed"] == 7 and meta["n"] == 4 and meta["hurst"] == 0.5
    assert meta["generator_name"].startswith("philox")
    assert meta["embedding_size"] == 8


def test_series_is_identical_across_workers(tmp_path, cache_dir):
    outputs = []
    for workers in ("1", "2"):
        out = tmp_path / f"series_{workers}.csv"
        code = main([
            "series", "--kind", "g1", "--q", "2", "--hurst", "0.5", "--eps-grid", "3.0,2.0",
            "--tol", "0.05", "--budget", "50000", "--seed", "7", "--workers", workers, "--output", str(out),
        ])
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0].decode().splitlines()[0] == ",".join(SERIES_COLUMNS)

    manifest = json.loads((tmp_path / "series_1.json").read_text())
    assert manifest["seed"] == 7 and manifest["budget"] == 50000
    assert set(manifest["schedule"]) == {"3.0", "2.0"}
    assert manifest["predicted_limit"] == 1.0
    assert "tool_version" in manifest["versions"]


def test_report_merges_series_runs(tmp_path, cache_dir, capsys):
    out = tmp_path / "run.csv"
    main(["series", "--kind", "f1", "--q", "2", "--hurst", "0.5", "--eps-grid", "3.0",
          "--tol", "0.05", "--budget", "20000", "--output", str(out)])
    capsys.readouterr()
    assert main(["report", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert lines[1].startswith("run.csv,F1,2,0.5,3.0,")


def test_series_table_reuses_seed(config):
    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    first, _ = series_table(kind, [3.0], tol=0.05, budget=20_000, seed=1, config=config)
    second, _ = series_table(kind, [3.0], tol=0.05, budget=20_000, seed=1, config=config)
    assert first == second


def test_bad_hurst_exits_two(cache_dir, capsys):
    assert main(["constants", "--q", "2", "--hurst", "1.5"]) == 2
    assert "--hurst" in capsys.readouterr().err


def test_wrong_regime_exits_two(cache_dir, capsys):
    assert main(["series", "--kind", "f2", "--q", "2", "--hurst", "0.5", "--eps-grid", "1"]) == 2
    assert "RegimeError" in capsys.readouterr().err


def test_unknown_kind_exits_two(cache_dir, capsys):
    assert main(["series", "--kind", "x", "--q", "2", "--hurst", "0.5"]) == 2
    assert "--kind" in capsys.readouterr().err


def test_missing_flag_exits_two(cache_dir, capsys):
    assert main(["constants", "--hurst", "0.5"]) == 2
    assert "--q" in capsys.readouterr().err


def test_argument_errors_exit_two(cache_dir):
    with pytest.raises(SystemExit) as info:
        main(["constants", "--q", "two"])
    assert info.value.code == 2


def test_budget_exceeded_exits_one(cache_dir, capsys):
    code = main(["series", "--kind", "g1", "--q", "2", "--hurst", "0.5", "--eps-grid", "0.01",
                 "--budget", "1000"])
    assert code == 1
    err = capsys.readouterr().err
    records = [json.loads(line) for line in err.splitlines() if line.startswith("{")]
    error_lines = [r for r in records if r.get("error") == "BudgetExceeded" and "budget" in r]
    assert error_lines and error_lines[0]["budget"] == 1000
    assert error_lines[0]["n_trunc"] > 1


def test_config_file_values_and_flag_override(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("q=2\nhurst=0.9\nlog-level=warning\n")
    rc = parse_run_config(["constants", "--config", str(path)])
    assert (rc.q, rc.hurst, rc.log_level) == (2, 0.9, "warning")
    rc = parse_run_config(["constants", "--config", str(path), "--hurst", "0.5"])
    assert rc.hurst == 0.5


def test_config_file_unknown_key(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("colour=blue\n")
    assert main(["constants", "--config", str(path)]) == 2
    assert "--config" in capsys.readouterr().err


def test_simulate_writes_sampled_increments(tmp_path, cache_dir):
    out = tmp_path / "path.csv"
    assert main(["simulate", "--hurst", "0.7", "--n", "64", "--seed", "3", "--output", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    sample = sample_fgn(PathSpec(64, 0.7, 3), RandomStream(3))
    assert [row[3] for row in rows[:-1]] == [repr(float(x)) for x in sample.increments]
    assert rows[-1][3] == ""
    assert float(rows[-1][2]) == fbm_path(sample)[-1]


@pytest.mark.parametrize("name", ["FBMVAR_SEED", "FBMVAR_WORKERS"])
def test_non_integer_environment_exits_two(cache_dir, capsys, monkeypatch, name):
    monkeypatch.setenv(name, "abc")
    assert main(["constants", "--q", "2", "--hurst", "0.5"]) == 2
    assert name in capsys.readouterr().err
