"""Readers for the simulator's external file formats.

Grid files: magic "AZGRID01" | u32 nlat | u32 nlon | f64 time |
nlat*nlon f64 values, row-major, all little-endian; latitudes at
theta_i = (i + 1/2) pi / nlat, longitudes phi_j = 2 pi j / nlon.

Diagnostics CSV: header
t,energy,supnorm,c2,c3,c4,i1,i2,b_eig_min,b_eig_max
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

GRID_MAGIC = b"AZGRID01"


class FormatError(ValueError):
    """A binary input failed validation; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SchemaError(ValueError):
    """A CSV input is missing a required column."""


def read_grid(path: str | Path) -> tuple[np.ndarray, float]:
    """Returns (values[nlat, nlon], time)."""
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:8] != GRID_MAGIC:
        raise FormatError("bad grid magic", 0)
    if len(raw) < 24:
        raise FormatError("truncated grid header", len(raw))
    nlat, nlon, t = struct.unpack_from("<IId", raw, 8)
    expected = 24 + nlat * nlon * 8
    if len(raw) != expected:
        raise FormatError(f"grid length {len(raw)} != expected {expected}",
                          min(len(raw), expected))
    vals = np.frombuffer(raw, dtype="<f8", offset=24).reshape(nlat, nlon)
    return vals.copy(), t


def read_series(path: str | Path, column: str = "supnorm"
                ) -> tuple[np.ndarray, np.ndarray]:
    """Returns (t, values) for one diagnostics column."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames \
                or "t" not in reader.fieldnames:
            raise SchemaError(
                f"{path}: diagnostics CSV must have 't' and '{column}' "
                f"columns, got {reader.fieldnames}")
        t, v = [], []
        for row in reader:
            t.append(float(row["t"]))
            v.append(float(row[column]))
    return np.asarray(t), np.asarray(v)
