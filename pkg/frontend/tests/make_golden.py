#!/usr/bin/env python3
"""Regenerate the golden images from fixed synthetic inputs.

Run from frontend/: python tests/make_golden.py
"""

from pathlib import Path

import numpy as np

from azplot.render import render_field, render_supnorm_series

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"


def two_lobe_grid(nlat=32, nlon=64):
    """cos(theta) profile: the (1,0) spherical harmonic shape."""
    theta = (np.arange(nlat) + 0.5) * np.pi / nlat
    return np.cos(theta)[:, None] * np.ones((1, nlon))


def four_lobe_grid(nlat=32, nlon=64):
    """sin(theta)cos(theta)cos(phi): the (2,1) spherical harmonic shape."""
    theta = (np.arange(nlat) + 0.5) * np.pi / nlat
    phi = 2 * np.pi * np.arange(nlon) / nlon
    return (np.sin(theta) * np.cos(theta))[:, None] * np.cos(phi)[None, :]


def growth_csv(path, rate, n_points=121, t_end=12.0):
    t = np.linspace(0.0, t_end, n_points)
    s = np.exp(rate * np.minimum(t, 8.0)) * np.exp(
        0.02 * rate * np.maximum(t - 8.0, 0.0))
    with open(path, "w") as fh:
        fh.write("t,energy,supnorm,c2,c3,c4,i1,i2,b_eig_min,b_eig_max\n")
        for ti, si in zip(t, s):
            fh.write(f"{ti:.17g},1,{si:.17g},0,0,0,0,0,0,0\n")


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    render_field(two_lobe_grid(), GOLDEN / "two_lobe_mollweide.png",
                 projection="mollweide", height=200)
    render_field(four_lobe_grid(), GOLDEN / "four_lobe_latlon.png",
                 projection="lat-lon", height=200)
    render_field(four_lobe_grid(), GOLDEN / "four_lobe_ortho.png",
                 projection="orthographic", height=200)
    growth_csv(GOLDEN / "series_a.csv", 0.30)
    growth_csv(GOLDEN / "series_b.csv", 0.22)
    render_supnorm_series(
        [GOLDEN / "series_a.csv", GOLDEN / "series_b.csv"],
        GOLDEN / "supnorm_overlay.png", log=True)
    print(f"golden files written to {GOLDEN}")


if __name__ == "__main__":
    main()
