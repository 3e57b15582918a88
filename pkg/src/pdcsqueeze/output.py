"""Deterministic CSV/JSON table writers.

Floats are printed with 12 significant digits in scientific notation,
independent of locale.  Infinite values print as ``inf``; a ``None`` cell
(e.g. an absent t_min) prints as an empty field in CSV and ``null`` in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Sequence

FLOAT_FORMAT = ".11e"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, FLOAT_FORMAT)
    if hasattr(value, "dtype"):  # numpy scalar
        return format_cell(value.item())
    return str(value)


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def _json_cell(value):
    text = format_cell(value)
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)) or hasattr(value, "dtype"):
        # non-finite floats stay strings, JSON has no literal for them
        return float(text) if text not in ("inf", "-inf", "nan") else text
    return text


def render_json(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    records = [{name: _json_cell(v) for name, v in zip(header, row)} for row in rows]
    return json.dumps({"columns": list(header), "rows": records}, indent=1) + "\n"


def render(header: Sequence[str], rows: Sequence[Sequence], fmt: str = "csv") -> str:
    if fmt == "csv":
        return render_csv(header, rows)
    if fmt == "json":
        return render_json(header, rows)
    raise ValueError(f"unknown format {fmt!r}")


def write_table(path: str | Path, header: Sequence[str], rows: Sequence[Sequence], fmt: str = "csv") -> None:
    Path(path).write_text(render(header, rows, fmt), encoding="utf-8", newline="")


def parse_cell(text: str):
    """Inverse of format_cell for numeric CSV fields."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    return float(text)
