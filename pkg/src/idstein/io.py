"""CSV tables with a JSON metadata sidecar."""
from __future__ import annotations

import csv
import json
import os

import numpy as np


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_table(path, columns: dict, meta: dict | None = None) -> str:
    """Write equal-length ``columns`` to ``path`` as CSV (17 significant
    digits) and ``meta`` to ``path + '.json'``.

    Returns
    -------
    str
        The CSV path.
    """
    names = list(columns)
    cols = [np.atleast_1d(np.asarray(columns[k])) for k in names]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("columns differ in length")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(n):
            w.writerow([_fmt(c[i]) for c in cols])
    if meta is not None:
        with open(str(path) + ".json", "w") as fh:
            json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
    return str(path)


def read_table(path) -> dict:
    """Inverse of :func:`write_table` for numeric columns."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names, body = rows[0], rows[1:]
    return {k: np.array([float(r[i]) for r in body]) for i, k in enumerate(names)}
