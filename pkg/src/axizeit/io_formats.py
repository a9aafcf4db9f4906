"""Run configuration, initial-data presets, and bit-exact file formats.

Binary layouts (all little-endian):
  snapshot: magic "AZSNAP01" | u32 n | f64 time | f64 hbar
            | P as n*n (re, im) f64 pairs, row-major | B likewise
  grid:     magic "AZGRID01" | u32 nlat | u32 nlon | f64 time
            | nlat*nlon f64 values, row-major
            (theta_i = (i + 1/2) pi / nlat, phi_j = 2 pi j / nlon)
  diagnostics CSV header:
            t,energy,supnorm,c2,c3,c4,i1,i2,b_eig_min,b_eig_max
            floats printed with 17 significant digits.
"""

from __future__ import annotations

import json
import os
import struct
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import BracketParams, ExtElement
from .diagnostics import DiagnosticsRecord
from .dynamics import default_dt
from .quantization import HarmonicCoeffs, build_harmonic_basis, quantize
from .rng import normals

SNAPSHOT_MAGIC = b"AZSNAP01"
GRID_MAGIC = b"AZGRID01"
CSV_HEADER = "t,energy,supnorm,c2,c3,c4,i1,i2,b_eig_min,b_eig_max"


class FormatError(ValueError):
    """A file failed validation; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


# -- configuration ----------------------------------------------------------

_INITIAL_KINDS = ("preset_sim1", "random_gauss", "coeff_file")


@dataclass
class SimConfig:
    n: int
    t_end: float
    output_dir: str
    dt: float | None = None
    method: str = "structure_preserving"
    fixed_point_tol: float = 1e-12
    max_fixed_point_iters: int = 100
    seed: int = 0
    initial: dict = field(default_factory=lambda: {"kind": "preset_sim1"})
    snapshot_every: int = 100
    diagnostics_every: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.dt is None:
            self.dt = default_dt(self.n)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.snapshot_every < 1 or self.diagnostics_every < 1:
            raise ValueError("cadences must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        kind = self.initial.get("kind")
        if kind not in _INITIAL_KINDS:
            raise ValueError(f"initial.kind must be one of {_INITIAL_KINDS}")

    @classmethod
    def from_json(cls, path: str | Path) -> "SimConfig":
        with open(path) as fh:
            data = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        missing = {"n", "t_end", "output_dir"} - set(data)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        return cls(**data)


# -- initial-data presets ---------------------------------------------------

def make_initial_sim1(n: int, params: BracketParams | None = None) -> ExtElement:
    """Single-harmonic data: vorticity degree (2,1), swirl degree (1,0)."""
    if n < 5:
        raise ValueError("n must be >= 5 to resolve the degree-2 harmonic")
    if params is None:
        params = BracketParams.build(n)
    hbasis = build_harmonic_basis(params.spin)
    a = HarmonicCoeffs.zeros(n - 1)
    a[2, 1] = 1.0
    b = HarmonicCoeffs.zeros(n - 1)
    b[1, 0] = 1.0
    P = params.lap.solve_poisson(quantize(a, hbasis))
    B = quantize(b, hbasis)
    return ExtElement(P, B)


def make_initial_random(n: int, lmax: int, seed: int,
                        params: BracketParams | None = None) -> ExtElement:
    """Band-limited Gaussian data from the documented counter generator.

    Coefficients are drawn in a fixed order — all vorticity coefficients
    (l = 0..lmax, m = -l..l), then all swirl coefficients — and the mean
    vorticity coefficient (0,0) is forced to zero afterwards.
    """
    if lmax > n - 1:
        raise ValueError("lmax must be <= n-1")
    if params is None:
        params = BracketParams.build(n)
    hbasis = build_harmonic_basis(params.spin)
    count = (lmax + 1) ** 2
    draws = normals(seed, 2 * count)
    a = HarmonicCoeffs.zeros(n - 1)
    b = HarmonicCoeffs.zeros(n - 1)
    k = 0
    for coeffs in (a, b):
        for ell in range(lmax + 1):
            for m in range(-ell, ell + 1):
                coeffs[ell, m] = draws[k]
                k += 1
    a[0, 0] = 0.0
    P = params.lap.solve_poisson(quantize(a, hbasis))
    B = quantize(b, hbasis)
    return ExtElement(P, B)


# -- snapshot files ---------------------------------------------------------

def write_snapshot(path: str | Path, x: ExtElement, t: float,
                   hbar: float) -> None:
    n = x.n
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<Idd", n, t, hbar))
        for M in (x.P, x.B):
            buf = np.empty((n, n, 2))
            buf[..., 0] = M.real
            buf[..., 1] = M.imag
            fh.write(buf.astype("<f8").tobytes())


def read_snapshot(path: str | Path) -> tuple[ExtElement, float, float]:
    """Returns (x, t, hbar); validates magic and length."""
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:8] != SNAPSHOT_MAGIC:
        raise FormatError("bad snapshot magic", 0)
    if len(raw) < 28:
        raise FormatError("truncated snapshot header", len(raw))
    n, t, hbar = struct.unpack_from("<Idd", raw, 8)
    expected = 28 + 2 * (n * n * 16)
    if len(raw) != expected:
        raise FormatError(
            f"snapshot length {len(raw)} != expected {expected} for n={n}",
            min(len(raw), expected))
    mats = []
    off = 28
    for _ in range(2):
        buf = np.frombuffer(raw, dtype="<f8", count=2 * n * n, offset=off)
        buf = buf.reshape(n, n, 2)
        mats.append(buf[..., 0] + 1j * buf[..., 1])
        off += n * n * 16
    return ExtElement(mats[0], mats[1]), t, hbar


# -- grid files -------------------------------------------------------------

def write_grid(path: str | Path, values: np.ndarray, t: float) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("grid values must be a 2-D array")
    nlat, nlon = values.shape
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC)
        fh.write(struct.pack("<IId", nlat, nlon, t))
        fh.write(values.astype("<f8").tobytes())


def read_grid(path: str | Path) -> tuple[np.ndarray, float]:
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:8] != GRID_MAGIC:
        raise FormatError("bad grid magic", 0)
    if len(raw) < 24:
        raise FormatError("truncated grid header", len(raw))
    nlat, nlon, t = struct.unpack_from("<IId", raw, 8)
    expected = 24 + nlat * nlon * 8
    if len(raw) != expected:
        raise FormatError(
            f"grid length {len(raw)} != expected {expected}",
            min(len(raw), expected))
    vals = np.frombuffer(raw, dtype="<f8", offset=24).reshape(nlat, nlon)
    return vals.copy(), t


# -- diagnostics CSV --------------------------------------------------------

def format_diagnostics_row(rec: DiagnosticsRecord) -> str:
    vals = (rec.t, rec.energy, rec.supnorm, rec.c2, rec.c3, rec.c4,
            rec.i1, rec.i2, rec.b_eig_min, rec.b_eig_max)
    return ",".join(format(v, ".17g") for v in vals)


class DiagnosticsWriter:
    """Appends records to a CSV file, writing the header once."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        if not self.path.exists() or self.path.stat().st_size == 0:
            self.path.write_text(CSV_HEADER + "\n")

    def append(self, rec: DiagnosticsRecord) -> None:
        with open(self.path, "a") as fh:
            fh.write(format_diagnostics_row(rec) + "\n")


# -- output-directory lock --------------------------------------------------

@contextmanager
def output_lock(output_dir: str | Path):
    """Exclusive lock file; a concurrent run into the same dir fails fast."""
    d = Path(output_dir)
    d.mkdir(parents=True, exist_ok=True)
    lock = d / "lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RuntimeError(
            f"output directory {d} is locked by another run "
            f"(remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield d
    finally:
        lock.unlink(missing_ok=True)
