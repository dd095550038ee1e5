"""CSV tables and JSON manifests written by the command-line front end."""

import csv
import io
import json
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np
import scipy
import structlog

from src import __version__

logger = structlog.get_logger(__name__)

PATH_COLUMNS = ("k", "t", "B_t", "increment_std")
RATE_COLUMNS = ("n", "ks", "stderr", "predicted_exponent")
SERIES_COLUMNS = (
    "epsilon", "value", "mc_stderr", "n_trunc", "remainder_bound", "normalized_ratio", "predicted_limit",
)
REPORT_COLUMNS = (
    "source", "kind", "q", "hurst", "epsilon", "value", "limit_part", "difference",
    "normalized_ratio", "predicted_limit",
)


def format_cell(value: Any) -> str:
    """Shortest round-trip text for floats so equal runs give equal bytes."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(handle: TextIO, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """Comma separated, period decimal, LF line endings."""
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    count = 0
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
        count += 1
    return count


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    write_csv(buffer, columns, rows)
    return buffer.getvalue()


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info("report_written", path=str(path), size=len(text))
    return path


def provenance(**extra: Any) -> Dict[str, Any]:
    """Versions and platform embedded in every manifest."""
    return {
        "tool_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        **extra,
    }


def json_text(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def sidecar_path(csv_path: Path) -> Path:
    return Path(csv_path).with_suffix(".json")


def read_series_run(csv_path: Path) -> List[Dict[str, Any]]:
    """Rows of one series CSV joined with the kind, (q, H) and limit parts of its manifest."""
    csv_path = Path(csv_path)
    manifest_path = sidecar_path(csv_path)
    manifest: Dict[str, Any] = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    else:
        logger.warning("report_manifest_missing", path=str(csv_path))
    limit_parts = {float(k): v for k, v in manifest.get("limit_parts", {}).items()}

    rows = []
    with csv_path.open(encoding="utf-8", newline="") as handle:
        for record in csv.DictReader(handle):
            missing = set(SERIES_COLUMNS) - set(record)
            if missing:
                raise ValueError(f"{csv_path} is not a series table; missing {sorted(missing)}")
            eps = float(record["epsilon"])
            value = float(record["value"])
            limit_part: Optional[float] = limit_parts.get(eps)
            rows.append({
                "source": csv_path.name,
                "kind": manifest.get("kind", ""),
                "q": manifest.get("q", ""),
                "hurst": manifest.get("hurst", ""),
                "epsilon": eps,
                "value": value,
                "limit_part": "" if limit_part is None else float(limit_part),
                "difference": "" if limit_part is None else value - float(limit_part),
                "normalized_ratio": float(record["normalized_ratio"]),
                "predicted_limit": float(record["predicted_limit"]),
            })
    return rows


def merge_series_runs(paths: Sequence[Path]) -> str:
    """Summary CSV of normalized ratio against predicted limit across runs."""
    rows = []
    for path in paths:
        rows.extend(read_series_run(path))
    return csv_text(REPORT_COLUMNS, ([row[c] for c in REPORT_COLUMNS] for row in rows))
