"""Persistence: binary field files, INI-style run configuration, JSON reports.

Field file layout (version 1, all little-endian):

    bytes 0..4    magic b"POBS1"
    byte  5       format version (uint8, currently 1)
    bytes 6..9    dim (int32)
    per axis      lo (float64), hi (float64), cells (int32)
    remainder     node values, float64, row-major, prod(cells_k + 1) entries
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import Grid, GridField, build_grid
from .errors import FieldIOError

MAGIC = b"POBS1"
FORMAT_VERSION = 1


def write_field(path, u: GridField) -> None:
    grid = u.grid
    parts = [MAGIC, struct.pack("<B", FORMAT_VERSION), struct.pack("<i", grid.dim)]
    for (lo, hi), n in zip(grid.extents, grid.cells):
        parts.append(struct.pack("<ddi", lo, hi, n))
    parts.append(np.ascontiguousarray(u.values, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_field(path) -> GridField:
    raw = Path(path).read_bytes()
    if raw[:5] != MAGIC:
        raise FieldIOError(f"bad magic {raw[:5]!r}, expected {MAGIC!r}", byte_offset=0)
    if len(raw) < 10:
        raise FieldIOError("truncated header", byte_offset=len(raw))
    version = raw[5]
    if version != FORMAT_VERSION:
        raise FieldIOError(f"unsupported format version {version}", byte_offset=5)
    (dim,) = struct.unpack_from("<i", raw, 6)
    if not 1 <= dim <= 8:
        raise FieldIOError(f"implausible dim {dim}", byte_offset=6)
    off = 10
    extents, cells = [], []
    for _ in range(dim):
        if off + 20 > len(raw):
            raise FieldIOError("truncated axis header", byte_offset=off)
        lo, hi, n = struct.unpack_from("<ddi", raw, off)
        if not hi > lo:
            raise FieldIOError(f"bad extent [{lo}, {hi}]", byte_offset=off)
        if n < 1:
            raise FieldIOError(f"bad cell count {n}", byte_offset=off + 16)
        extents.append((lo, hi))
        cells.append(n)
        off += 20
    count = int(np.prod([n + 1 for n in cells]))
    expected = off + 8 * count
    if len(raw) != expected:
        raise FieldIOError(
            f"payload has {len(raw) - off} bytes, expected {8 * count}",
            byte_offset=min(len(raw), expected),
        )
    values = np.frombuffer(raw, dtype="<f8", offset=off, count=count).reshape(
        [n + 1 for n in cells]
    )
    grid = build_grid(extents, cells)
    return GridField(grid, values.astype(float))


def write_report(path, report: dict) -> None:
    """Deterministic JSON persistence (sorted keys, fixed separators)."""
    Path(path).write_text(
        json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    )


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())
