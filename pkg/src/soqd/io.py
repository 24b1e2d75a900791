"""Deterministic CSV and JSON writers."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def write_columns(path, header, columns) -> Path:
    path = Path(path)
    cols = [np.asarray(c) for c in columns]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(v) for v in row])
    return path


def write_curve(path, curve, extra=None) -> Path:
    """``T, factor`` plus optional named columns (e.g. reduced-density weights)."""
    header, cols = ["T", "factor"], [curve.times, curve.factor]
    for name, values in (extra or {}).items():
        header.append(name)
        cols.append(values)
    return write_columns(path, header, cols)


def write_grid(path, grid) -> Path:
    """First row holds t' values, first column t values, body G(t, t')."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t\\t'"] + [fmt(v) for v in grid.tprime_values])
        for t, row in zip(grid.t_values, grid.g):
            w.writerow([fmt(t)] + [fmt(v) for v in row])
    return path


def read_grid(path):
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    tp = np.array([float(v) for v in rows[0][1:]])
    t = np.array([float(r[0]) for r in rows[1:]])
    g = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return t, tp, g


def write_matrix(path, matrix) -> Path:
    """Row-major complex matrix, each cell written as a ``re, im`` pair."""
    m = np.asarray(matrix, dtype=complex)
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{part}{j}" for j in range(m.shape[1]) for part in ("re", "im")])
        for row in m:
            w.writerow([fmt(getattr(v, part)) for v in row for part in ("real", "imag")])
    return path


def read_matrix(path) -> np.ndarray:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))[1:]
    vals = np.array([[float(v) for v in r] for r in rows])
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def read_columns(path) -> dict:
    with Path(path).open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return {name: data[:, i] for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
