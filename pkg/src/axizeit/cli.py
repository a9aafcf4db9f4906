"""Command-line driver: simulations, conjugate-point scans, curvature
samples, grid exports, and initial-data generation.

Exit codes: 0 success, 1 runtime failure (one machine-readable
"error: ..." line on stderr), 2 usage error.  The environment variable
AXIZEIT_THREADS caps BLAS parallelism (applied via threadpoolctl when
available).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .algebra import BracketParams, ExtElement, normalized_sectional_curvature
from .diagnostics import collect
from .dynamics import (IntegratorConfig, SimState, StepFailure, _STEPPERS)
from .io_formats import (DiagnosticsWriter, SimConfig, make_initial_random,
                         make_initial_sim1, output_lock, read_snapshot,
                         write_grid, write_snapshot)
from .jacobi import conjugate_times, detect_conjugate_numerical
from .quantization import (HarmonicCoeffs, build_harmonic_basis, dequantize,
                           grid_eval, quantize)
from .rng import normals


class UsageError(Exception):
    """Invalid configuration or arguments; maps to exit code 2."""


def _load_config(path: str) -> SimConfig:
    try:
        return SimConfig.from_json(path)
    except (ValueError, OSError) as err:
        raise UsageError(f"invalid config {path}: {err}") from err


def _apply_thread_cap() -> None:
    cap = os.environ.get("AXIZEIT_THREADS")
    if not cap:
        return
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(int(cap))
    except ImportError:
        # best effort: affects libraries that re-read the env lazily
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = cap


def _load_initial(cfg: SimConfig, params: BracketParams) -> ExtElement:
    kind = cfg.initial["kind"]
    if kind == "preset_sim1":
        return make_initial_sim1(cfg.n, params)
    if kind == "random_gauss":
        lmax = int(cfg.initial.get("lmax", 10))
        seed = int(cfg.initial.get("seed", cfg.seed))
        return make_initial_random(cfg.n, lmax, seed, params)
    # coeff_file: two JSON files of [l, m, value] triples
    hbasis = build_harmonic_basis(params.spin)

    def load_coeffs(path: str) -> HarmonicCoeffs:
        triples = json.loads(Path(path).read_text())
        c = HarmonicCoeffs.zeros(cfg.n - 1)
        for ell, m, val in triples:
            c[int(ell), int(m)] = float(val)
        return c

    a = load_coeffs(cfg.initial["path_psi"])
    b = load_coeffs(cfg.initial["path_sigma"])
    P = params.lap.solve_poisson(quantize(a, hbasis))
    return ExtElement(P, quantize(b, hbasis))


def _simulate(cfg: SimConfig, params: BracketParams, state: SimState,
              start_step: int, outdir: Path) -> int:
    """Shared run/resume loop; returns exit code."""
    icfg = IntegratorConfig(dt=cfg.dt, method=cfg.method,
                            fixed_point_tol=cfg.fixed_point_tol,
                            max_fixed_point_iters=cfg.max_fixed_point_iters)
    step_fn = _STEPPERS[cfg.method]
    diag = DiagnosticsWriter(outdir / "diagnostics.csv")
    hbar = params.spin.hbar

    def snap_path(i: int) -> Path:
        return outdir / f"snapshot_{i:08d}.bin"

    n_steps = int(round((cfg.t_end - state.t) / cfg.dt))
    if start_step == 0:
        diag.append(collect(state.x, state.t, params))
        write_snapshot(snap_path(0), state.x, state.t, hbar)
    for i in range(start_step + 1, start_step + n_steps + 1):
        try:
            state = step_fn(state, icfg, params)
        except StepFailure as err:
            write_snapshot(outdir / "failed_last_good.bin", state.x,
                           state.t, hbar)
            print(f"error: step_failure: {err} (residual {err.residual:.3e}, "
                  f"last good state saved)", file=sys.stderr)
            return 1
        if i % cfg.diagnostics_every == 0 or i == start_step + n_steps:
            diag.append(collect(state.x, state.t, params))
        if i % cfg.snapshot_every == 0 or i == start_step + n_steps:
            write_snapshot(snap_path(i), state.x, state.t, hbar)
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    params = BracketParams.build(cfg.n)
    with output_lock(cfg.output_dir) as outdir:
        initial = _load_initial(cfg, params)
        return _simulate(cfg, params, SimState(0.0, initial), 0, outdir)


def cmd_resume(args) -> int:
    cfg = _load_config(args.config)
    x, t, _hbar = read_snapshot(args.snapshot)
    if x.n != cfg.n:
        raise ValueError(f"snapshot n={x.n} does not match config n={cfg.n}")
    start_step = int(round(t / cfg.dt))
    with output_lock(cfg.output_dir) as outdir:
        return _simulate(cfg, params_for(cfg.n), SimState(t, x), start_step,
                         outdir)


def params_for(n: int) -> BracketParams:
    return BracketParams.build(n)


def cmd_jacobi(args) -> int:
    detections = sorted(
        detect_conjugate_numerical(args.l, args.m, args.n, args.dt,
                                   args.tmax, branch="c")
        + detect_conjugate_numerical(args.l, args.m, args.n, args.dt,
                                     args.tmax, branch="d"))
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        print("l,m,k,predicted_time,detected_time,gap", file=out)
        k_max = max(1, int(args.tmax * args.m / (4 * math.pi * args.l)))
        for k in range(1, k_max + 1):
            for fam in (args.l, args.l + 1):
                t_pred = 4.0 * math.pi * k * fam / args.m
                if t_pred > args.tmax:
                    continue
                gaps = [abs(t - t_pred) for t in detections]
                if gaps:
                    j = int(np.argmin(gaps))
                    print(f"{args.l},{args.m},{k},{t_pred:.17g},"
                          f"{detections[j]:.17g},{gaps[j]:.17g}", file=out)
                else:
                    print(f"{args.l},{args.m},{k},{t_pred:.17g},nan,nan",
                          file=out)
    finally:
        if args.output:
            out.close()
    return 0


def cmd_curvature(args) -> int:
    params = BracketParams.build(args.n)
    n = args.n
    per_mat = 2 * n * n
    draws = normals(args.seed, args.samples * 4 * per_mat)
    print("sample,curvature")
    pos = 0
    k = 0

    def next_skew(traceless: bool):
        nonlocal k
        vec = draws[k:k + per_mat]
        k += per_mat
        A = vec[:n * n].reshape(n, n) + 1j * vec[n * n:].reshape(n, n)
        A = 0.5 * (A - A.conj().T)
        if traceless:
            A = A - (np.trace(A) / n) * np.eye(n)
        return A

    for s in range(args.samples):
        u = ExtElement(next_skew(True), next_skew(False))
        v = ExtElement(next_skew(True), next_skew(False))
        kap = normalized_sectional_curvature(u, v, params)
        pos += kap > 0
        print(f"{s},{kap:.17g}")
    print(f"# positive fraction: {pos / args.samples:.3f}", file=sys.stderr)
    return 0


def cmd_export_grid(args) -> int:
    x, t, _hbar = read_snapshot(args.snapshot)
    params = BracketParams.build(x.n)
    hbasis = build_harmonic_basis(params.spin)
    if args.field == "vorticity":
        M = params.lap.apply(x.P) + x.B
    elif args.field == "swirl":
        M = x.B
    else:
        M = x.P
    coeffs = dequantize(M, hbasis)
    values = grid_eval(coeffs, args.nlat, args.nlon)
    write_grid(args.output, values, t)
    return 0


def cmd_make_initial(args) -> int:
    params = BracketParams.build(args.n)
    if args.preset == "sim1":
        x = make_initial_sim1(args.n, params)
    else:
        x = make_initial_random(args.n, args.lmax, args.seed, params)
    write_snapshot(args.output, x, 0.0, params.spin.hbar)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="axizeit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("run", help="run a simulation from a JSON config")
    q.add_argument("--config", required=True)
    q.set_defaults(fn=cmd_run)

    q = sub.add_parser("resume", help="continue a run from a snapshot")
    q.add_argument("--snapshot", required=True)
    q.add_argument("--config", required=True)
    q.set_defaults(fn=cmd_resume)

    q = sub.add_parser("jacobi", help="conjugate-point scan of one block")
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--tmax", type=float, required=True)
    q.add_argument("--dt", type=float, default=1e-3)
    q.add_argument("--output")
    q.set_defaults(fn=cmd_jacobi)

    q = sub.add_parser("curvature", help="sample normalized curvatures")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(fn=cmd_curvature)

    q = sub.add_parser("export-grid", help="evaluate a snapshot on a grid")
    q.add_argument("--snapshot", required=True)
    q.add_argument("--nlat", type=int, required=True)
    q.add_argument("--nlon", type=int, required=True)
    q.add_argument("--field", choices=("vorticity", "swirl", "stream"),
                   required=True)
    q.add_argument("--output", "-o", required=True)
    q.set_defaults(fn=cmd_export_grid)

    q = sub.add_parser("make-initial", help="write an initial snapshot")
    q.add_argument("--preset", choices=("sim1", "random"), required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--lmax", type=int, default=10)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--output", "-o", required=True)
    q.set_defaults(fn=cmd_make_initial)
    return p


def main(argv=None) -> int:
    _apply_thread_cap()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as err:
        print(f"error: usage: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
