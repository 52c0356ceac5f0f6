"""Vectors and weight tables stored as CSV columns."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .seminorms import WeightedNorm, WeightedSpacePair


def read_table(path) -> dict[str, np.ndarray]:
    """Columns of a CSV file with a header row; one value per cell."""
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty table")
    head, body = [h.strip() for h in rows[0]], rows[1:]
    if any(len(r) != len(head) for r in body):
        raise ValueError(f"{path}: ragged rows")
    cols = np.array(body, dtype=np.float64).reshape(len(body), len(head))
    return {name: cols[:, i].copy() for i, name in enumerate(head)}


def write_table(columns: dict, path) -> Path:
    path = Path(path)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=np.float64) for k in names])
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow([f"{v:.17g}" for v in row])
    return path


def pair_from_table(path, p0: float = 1.0, p1: float = 1.0):
    """A weighted pair and an element from columns ``w0``, ``w1`` and ``x``."""
    cols = read_table(path)
    missing = {"w0", "w1", "x"} - set(cols)
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    pair = WeightedSpacePair(WeightedNorm(cols["w0"], p0), WeightedNorm(cols["w1"], p1))
    return pair, cols["x"]
