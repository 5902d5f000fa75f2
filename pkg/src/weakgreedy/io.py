"""CSV/JSON output with shortest round-trip floats and atomic writes."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = ["fmt", "write_csv", "write_json", "read_csv", "atomic_write_text",
           "sigmas_rows", "A_rows", "elements_rows", "elements_header", "widths_rows", "bounds_rows"]


def fmt(v) -> str:
    """Shortest decimal string that round-trips (``repr`` of a Python float)."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(v)


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        if isinstance(r, dict):
            r = [r[h] for h in header]
        w.writerow([fmt(v) for v in r])
    atomic_write_text(path, buf.getvalue())


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path, obj):
    atomic_write_text(path, json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")


def sigmas_rows(sigmas):
    return [(n, float(s)) for n, s in enumerate(sigmas)]


def A_rows(A):
    A = np.asarray(A)
    return [(i, j, float(A[i, j])) for i in range(A.shape[0]) for j in range(i + 1)]


def elements_rows(E):
    """One row per element: index then coordinates."""
    return [[i] + [float(v) for v in row] for i, row in enumerate(np.asarray(E))]


def elements_header(dim: int):
    return ["index"] + [f"x{k}" for k in range(dim)]


def widths_rows(ws):
    return [(n, v, tag, prov) for n, v, tag, prov in ws.rows()]


BOUNDS_HEADER = ["name", "N", "K", "m", "gamma", "lhs_log", "rhs_log", "slack_log", "pass", "notes"]


def bounds_rows(reports):
    return [r.row() for r in reports]
