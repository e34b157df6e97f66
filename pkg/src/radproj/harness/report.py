"""Report emission: JSON for machines, CSV for tables, both headed by the config digest."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable

from ..theorems import BoundReport

REPORT_FIELDS = [
    "theorem", "q", "d", "e", "family", "sizeE", "M", "C",
    "hypotheses_met", "measured", "bound", "holds", "seed", "runtime_ms",
]


def reports_json(reports: Iterable[BoundReport], manifest: dict) -> str:
    doc = {
        "config_digest": manifest["config_digest"],
        "version": manifest["version"],
        "reports": [r.to_json() for r in reports],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def rows_csv(rows: Iterable[dict], columns: list[str], digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config_digest={digest}\n")
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def reports_csv(reports: Iterable[BoundReport], manifest: dict) -> str:
    return rows_csv((r.to_json() for r in reports), REPORT_FIELDS, manifest["config_digest"])


def strip_timing(doc: dict) -> dict:
    """Copy of a JSON report without runtime fields, for reproducibility checks."""
    out = dict(doc)
    out["reports"] = [{k: v for k, v in r.items() if k != "runtime_ms"} for r in doc["reports"]]
    return out


def write_text(path: str | Path | None, text: str) -> None:
    if path is None or str(path) == "-":
        print(text, end="")
        return
    Path(path).write_text(text)
