"""Deterministic CSV/JSON emission for scenario results.

Floats are serialised with 12 significant digits so identical runs produce
byte-identical data files.  The JSON layout mirrors the CSV: a column list
plus rows of numbers; ``validate_output_json`` re-checks emitted documents.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ConfigError

OUTPUT_SCHEMA_VERSION = "uscarray-table-v1"


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in output")
    return f"{x:.12g}"


def write_csv(path, columns, rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match column count")
        lines.append(",".join(format_float(float(v)) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, scenario_id, columns, rows) -> None:
    doc = {
        "schema": OUTPUT_SCHEMA_VERSION,
        "scenario_id": scenario_id,
        "columns": list(columns),
        "rows": [[float(format_float(float(v))) for v in row] for row in rows],
    }
    validate_output_json(doc)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def validate_output_json(doc) -> None:
    """Check an emitted JSON document against the table schema."""
    issues = []
    if doc.get("schema") != OUTPUT_SCHEMA_VERSION:
        issues.append(("schema", f"expected {OUTPUT_SCHEMA_VERSION!r}"))
    if not isinstance(doc.get("scenario_id"), str):
        issues.append(("scenario_id", "must be a string"))
    cols = doc.get("columns")
    if not isinstance(cols, list) or not all(isinstance(c, str) for c in cols):
        issues.append(("columns", "must be a list of strings"))
    rows = doc.get("rows")
    if not isinstance(rows, list):
        issues.append(("rows", "must be a list"))
    else:
        for k, row in enumerate(rows):
            if not isinstance(row, list) or (cols and len(row) != len(cols)):
                issues.append((f"rows[{k}]", "length mismatch with columns"))
                break
            if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in row):
                issues.append((f"rows[{k}]", "non-finite or non-numeric entry"))
                break
    if issues:
        raise ConfigError(issues)


def read_csv(path):
    """Parse a CSV written by write_csv back into (columns, array)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines:
        raise ValueError(f"{path}: empty file")
    columns = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return columns, data


def write_metadata(path, metadata: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(metadata, fh, indent=1, sort_keys=True, default=_meta_default)
        fh.write("\n")


def _meta_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj)} in metadata")
