"""Deterministic rendering of sphere heatmaps and sup-norm growth curves.

Field images are rasterized directly with numpy (per-pixel inverse
projection, nearest-neighbor sampling) and written with Pillow, so the
bytes depend only on the data and the job parameters.  Time-series
figures use the matplotlib Agg backend with metadata stripped.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from PIL import Image  # noqa: E402

PROJECTIONS = ("lat-lon", "mollweide", "orthographic")
_BACKGROUND = (255, 255, 255, 255)


def _sample_indices(lat: np.ndarray, lon: np.ndarray,
                    nlat: int, nlon: int) -> tuple[np.ndarray, np.ndarray]:
    """Nearest grid cell for latitude in [-pi/2, pi/2], longitude any."""
    theta = np.pi / 2 - lat  # colatitude in [0, pi]
    i = np.clip(np.floor(theta / np.pi * nlat).astype(int), 0, nlat - 1)
    j = np.floor(np.mod(lon, 2 * np.pi) / (2 * np.pi) * nlon).astype(int)
    return i, np.clip(j, 0, nlon - 1)


def _project(values: np.ndarray, projection: str,
             height: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel sampled field and validity mask for one projection."""
    nlat, nlon = values.shape
    if projection == "lat-lon":
        width = 2 * height
        y = (np.arange(height) + 0.5) / height          # 0 (N) .. 1 (S)
        x = (np.arange(width) + 0.5) / width
        lat = np.pi / 2 - y * np.pi
        lon = x * 2 * np.pi
        i, j = _sample_indices(lat[:, None] * np.ones_like(lon),
                               np.ones_like(lat)[:, None] * lon, nlat, nlon)
        return values[i, j], np.ones((height, width), bool)
    if projection == "mollweide":
        width = 2 * height
        y = 1.0 - 2.0 * (np.arange(height) + 0.5) / height      # 1 .. -1
        x = (2.0 * (np.arange(width) + 0.5) / width - 1.0) * 2  # -2 .. 2
        X, Y = np.meshgrid(x, y)
        inside = (X / 2) ** 2 + Y ** 2 <= 1.0
        aux = np.arcsin(np.clip(Y, -1, 1))
        with np.errstate(invalid="ignore", divide="ignore"):
            lat = np.arcsin(np.clip(
                (2 * aux + np.sin(2 * aux)) / np.pi, -1, 1))
            lon = np.pi * X / (2 * np.cos(aux))
        lon = np.where(np.isfinite(lon), lon, 0.0)
        i, j = _sample_indices(lat, lon, nlat, nlon)
        return values[i, j], inside
    if projection == "orthographic":
        width = height
        y = 1.0 - 2.0 * (np.arange(height) + 0.5) / height
        x = 2.0 * (np.arange(width) + 0.5) / width - 1.0
        X, Y = np.meshgrid(x, y)
        r2 = X ** 2 + Y ** 2
        inside = r2 <= 1.0
        Z = np.sqrt(np.clip(1.0 - r2, 0.0, None))
        lat = np.arcsin(np.clip(Y, -1, 1))
        lon = np.arctan2(X, Z)
        i, j = _sample_indices(lat, lon, nlat, nlon)
        return values[i, j], inside
    raise ValueError(f"unknown projection {projection!r}; "
                     f"expected one of {PROJECTIONS}")


def render_field(values: np.ndarray, out_path: str | Path,
                 projection: str = "mollweide", cmap: str = "RdBu_r",
                 height: int = 400) -> None:
    """Write a heatmap PNG with a symmetric color scale centered at 0."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("field values must be a 2-D grid")
    sampled, mask = _project(values, projection, height)
    vmax = float(np.max(np.abs(values)))
    if vmax == 0.0:
        vmax = 1.0  # all-zero field renders uniform mid-scale
    normalized = 0.5 + sampled / (2.0 * vmax)
    rgba = (matplotlib.colormaps[cmap](normalized) * 255).astype(np.uint8)
    rgba[~mask] = _BACKGROUND
    Image.fromarray(rgba, mode="RGBA").save(out_path, format="PNG")


def _exponential_reference(t: np.ndarray, s: np.ndarray
                           ) -> tuple[np.ndarray, np.ndarray]:
    """Exponential fitted to the growth phase (up to 95% of the max)."""
    stop = int(np.argmax(s >= 0.95 * np.max(s)))
    stop = max(stop, 2)
    w = slice(0, stop + 1)
    rate, log_s0 = np.polyfit(t[w], np.log(np.maximum(s[w], 1e-300)), 1)
    return t, np.exp(log_s0 + rate * t)


def render_supnorm_series(csv_paths, out_path: str | Path,
                          log: bool = False, dpi: int = 100) -> None:
    """Overlay sup-norm curves from diagnostics CSVs, one per file.

    Legend labels come from the file names; an exponential fitted to the
    first curve's growth phase is drawn as a dashed reference.
    """
    from .formats import read_series
    csv_paths = list(csv_paths)
    if not csv_paths:
        raise ValueError("at least one diagnostics CSV is required")
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=dpi)
    try:
        for path in csv_paths:
            t, s = read_series(path, "supnorm")
            ax.plot(t, s, label=Path(path).name)
        t0, ref = _exponential_reference(*read_series(csv_paths[0],
                                                      "supnorm"))
        ax.plot(t0, ref, "--", color="0.5", linewidth=1,
                label="exponential reference")
        if log:
            ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel("vorticity sup-norm")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(out_path, format="png", metadata={"Software": None})
    finally:
        plt.close(fig)
