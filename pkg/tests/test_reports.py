import json

import numpy as np
import pytest

from src.storage.reports import (
    REPORT_COLUMNS,
    SERIES_COLUMNS,
    csv_text,
    format_cell,
    json_text,
    merge_series_runs,
    provenance,
    read_series_run,
    sidecar_path,
    write_text,
)


def test_float_cells_round_trip():
    assert format_cell(0.1) == "0.1"
    assert float(format_cell(np.float64(1 / 3))) == 1 / 3
    assert format_cell(np.int64(7)) == "7"
    assert format_cell("") == ""


def test_csv_uses_lf_and_commas():
    text = csv_text(("a", "b"), [(1, 0.5), (2, 0.25)])
    assert text == "a,b\n1,0.5\n2,0.25\n"


def test_json_is_sorted_and_handles_numpy():
    payload = json.loads(json_text({"b": np.float64(1.5), "a": np.arange(2)}))
    assert payload == {"a": [0, 1], "b": 1.5}


def test_provenance_fields():
    info = provenance(seed=3)
    assert {"tool_version", "numpy", "scipy", "python"} <= set(info)
    assert info["seed"] == 3


def _series_run(directory, name, kind, limit_parts):
    rows = [(eps, 10.0 * eps, 0.1, 32, 0.01, 1.9, 2.0) for eps in (1.0, 0.5)]
    csv_path = write_text(directory / name, csv_text(SERIES_COLUMNS, rows))
    manifest = {"kind": kind, "q": 2, "hurst": 0.5, "limit_parts": {repr(k): v for k, v in limit_parts.items()}}
    write_text(sidecar_path(csv_path), json_text(manifest))
    return csv_path


def test_merge_joins_manifests(tmp_path):
    first = _series_run(tmp_path, "f1.csv", "F1", {1.0: 9.0, 0.5: 4.0})
    second = _series_run(tmp_path, "g1.csv", "G1", {1.0: 10.0})
    lines = merge_series_runs([first, second]).splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS)
    assert len(lines) == 5
    assert lines[1].startswith("f1.csv,F1,2,0.5,1.0,10.0,9.0,1.0,")
    # no limit part recorded for g1 at eps = 0.5
    assert lines[4].split(",")[6] == ""


def test_rejects_non_series_table(tmp_path):
    path = write_text(tmp_path / "rates.csv", csv_text(("n", "ks"), [(64, 0.1)]))
    with pytest.raises(ValueError):
        read_series_run(path)
