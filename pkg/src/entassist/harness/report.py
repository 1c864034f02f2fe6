"""Report files: a JSON document (header, rows, summary) plus a CSV row table.

CSV floats use 17 significant digits; JSON floats use Python's shortest
round-trip repr. Non-finite values are written as ``null`` / empty cells.
Only the JSON header carries a timestamp, so CSV output is byte-identical
across reruns of the same configuration.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .. import __version__


@dataclass
class ReportFile:
    command: str
    header: dict
    rows: list[dict]
    summary: dict
    exit_code: int = 0
    figures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"header": _jsonable(self.header),
                "rows": [_jsonable(r) for r in self.rows],
                "summary": _jsonable(self.summary),
                "exit_code": self.exit_code}


def make_header(config: dict) -> dict:
    return {"tool": "entassist", "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "config": config}


def _jsonable(obj: Any):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _jsonable(obj.item())
    return obj


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "item") and callable(value.item):
        value = value.item()
    if isinstance(value, float):
        return "%.17g" % value if math.isfinite(value) else ""
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(_jsonable(value), separators=(",", ":"))
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_report(report: ReportFile, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / f"{report.command}.json"
    csv_path = out / f"{report.command}.csv"
    doc = report.to_json()
    doc["figures"] = list(report.figures)
    json_path.write_text(json.dumps(doc, indent=1, allow_nan=False) + "\n")
    csv_path.write_text(rows_to_csv(report.rows))
    return json_path, csv_path


def read_csv_rows(path: str | Path) -> list[dict]:
    """Rows back from a report CSV with numeric cells parsed as floats."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: _parse_cell(v) for k, v in row.items()} for row in rows]


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text
