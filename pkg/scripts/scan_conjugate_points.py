#!/usr/bin/env python3
"""Conjugate-point scan along the steady rotation.

For each requested (l, m) block, compares the analytically predicted
conjugate times 4*pi*k*l/m and 4*pi*k*(l+1)/m with the times detected by
integrating the linearized equations.

Usage:
    python scripts/scan_conjugate_points.py --blocks 1,1 2,1 2,2 3,2 --n 9
"""

import argparse
import math

from axizeit.jacobi import conjugate_times, detect_conjugate_numerical


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--blocks", nargs="+", default=["1,1", "2,1", "2,2"],
                    help="l,m pairs")
    ap.add_argument("--n", type=int, default=9)
    ap.add_argument("--k-max", type=int, default=2)
    ap.add_argument("--dt", type=float, default=5e-3)
    args = ap.parse_args()

    print("l,m,predicted_time,multiplicity,detected_time,gap")
    for block in args.blocks:
        ell, m = (int(v) for v in block.split(","))
        t_max = 4.0 * math.pi * args.k_max * (ell + 1) / m + 1.0
        detections = sorted(
            detect_conjugate_numerical(ell, m, args.n, args.dt, t_max,
                                       branch="c")
            + detect_conjugate_numerical(ell, m, args.n, args.dt, t_max,
                                         branch="d"))
        for t_pred, mult in conjugate_times(ell, m, args.k_max):
            gaps = [abs(t - t_pred) for t in detections]
            if gaps:
                j = min(range(len(gaps)), key=gaps.__getitem__)
                print(f"{ell},{m},{t_pred:.9f},{mult},"
                      f"{detections[j]:.9f},{gaps[j]:.3g}")
            else:
                print(f"{ell},{m},{t_pred:.9f},{mult},nan,nan")


if __name__ == "__main__":
    main()
