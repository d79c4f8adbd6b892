"""Artifact files: CSV tables with a header row, JSON documents.

Floats are written with ``repr`` (shortest round-trip form), so a table read
back with :func:`read_csv` reproduces the written values exactly and equal
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, columns: dict) -> Path:
    """Write equal-length columns; keys become the header."""
    path = Path(path)
    names = list(columns)
    cols = [list(np.asarray(columns[n]).tolist()) if not isinstance(columns[n], list) else columns[n]
            for n in names]
    if len({len(c) for c in cols}) > 1:
        raise ValueError("columns differ in length")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([_cell(x) for x in row])
    return path


def _parse_column(values):
    try:
        return np.array([float(v) for v in values])
    except ValueError:
        return list(values)


def read_csv(path) -> dict:
    """Inverse of write_csv: numeric columns become float arrays, others stay strings."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {name: _parse_column([r[i] for r in body]) for i, name in enumerate(header)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        # JSON has no inf/nan; keep them readable and parseable
        return x if math.isfinite(x) else str(x)
    return x


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_artifact(path):
    """Dispatch on suffix: .csv -> dict of columns, .json -> dict."""
    path = Path(path)
    if path.suffix == ".csv":
        return read_csv(path)
    if path.suffix == ".json":
        return read_json(path)
    raise ValueError(f"unknown artifact type {path.suffix!r}")


def write_gnuplot(path, columns: dict) -> Path:
    """Whitespace-separated blocks with a '#' header, for gnuplot's ``plot 'f' u 1:2``."""
    path = Path(path)
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    with path.open("w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(names) + "\n")
        for row in zip(*cols):
            fh.write(" ".join(_cell(x) for x in row) + "\n")
    return path
