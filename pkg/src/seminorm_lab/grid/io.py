"""Grid function files: a raw binary format and CSV."""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .field import GridFunction, GridSpec

MAGIC = b"SNLB"
VERSION = 1
# magic, version, n, N1, N2, N3, L
_HEADER = struct.Struct("<4sIIIIId")
assert _HEADER.size == 32


class FormatError(ValueError):
    """A file does not hold a grid function in the expected layout."""


def to_bytes(f: GridFunction) -> bytes:
    if not f.real:
        raise FormatError("the raw format stores real samples only")
    spec = f.spec
    sizes = list(spec.sizes) + [0] * (3 - spec.n)
    head = _HEADER.pack(MAGIC, VERSION, spec.n, *sizes, spec.L)
    return head + np.ascontiguousarray(f.values, dtype="<f8").tobytes()


def from_bytes(data: bytes, name: str = "") -> GridFunction:
    if len(data) < _HEADER.size:
        raise FormatError("truncated header")
    magic, version, n, n1, n2, n3, L = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if n not in (1, 2, 3):
        raise FormatError(f"bad dimension {n}")
    try:
        spec = GridSpec(n, (n1, n2, n3)[:n], L)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    body = data[_HEADER.size:]
    if len(body) != 8 * spec.total:
        raise FormatError(f"expected {8 * spec.total} bytes of samples, got {len(body)}")
    vals = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(spec.shape)
    return GridFunction(spec, vals, True, name)


def write_raw(f: GridFunction, path) -> Path:
    path = Path(path)
    path.write_bytes(to_bytes(f))
    return path


def read_raw(path) -> GridFunction:
    path = Path(path)
    return from_bytes(path.read_bytes(), name=path.stem)


def write_csv(f: GridFunction, path) -> Path:
    """One row per sample: the integer indices then the value."""
    if not f.real:
        raise FormatError("CSV output stores real samples only")
    path = Path(path)
    spec = f.spec
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"#n={spec.n}", f"N={'x'.join(map(str, spec.sizes))}", f"L={spec.L!r}"])
        w.writerow([f"i{k}" for k in range(spec.n)] + ["value"])
        for idx in np.ndindex(*spec.shape):
            w.writerow([*idx, repr(float(f.values[idx]))])
    return path


def read_csv(path, spec: GridSpec | None = None) -> GridFunction:
    """Read a CSV grid function; the grid comes from the comment line or ``spec``."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and rows[0][0].startswith("#"):
        meta = dict(cell.lstrip("#").split("=", 1) for cell in rows[0])
        spec = spec or GridSpec(int(meta["n"]), tuple(int(v) for v in meta["N"].split("x")),
                                float(meta["L"]))
        rows = rows[1:]
    if spec is None:
        raise FormatError("no grid description in the file and none given")
    header, body = rows[0], rows[1:]
    if len(header) != spec.n + 1:
        raise FormatError(f"expected {spec.n} index columns and a value column")
    vals = np.full(spec.shape, np.nan)
    for row in body:
        idx = tuple(int(v) for v in row[:spec.n])
        vals[idx] = float(row[spec.n])
    if np.isnan(vals).any():
        raise FormatError("missing samples")
    return GridFunction(spec, vals, True, path.stem)


def load(path) -> GridFunction:
    """Dispatch on the suffix: ``.csv`` or raw."""
    path = Path(path)
    return read_csv(path) if path.suffix.lower() == ".csv" else read_raw(path)
