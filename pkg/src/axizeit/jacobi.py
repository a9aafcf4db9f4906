"""Linearized (Jacobi) dynamics along geodesics of the matrix flow.

General linearized equations around an arbitrary background, the
closed-form coefficient solutions along the steady rotation
P = B = hbar*S3, and numerical conjugate-point detection.

Along the steady rotation the linearization block-diagonalizes in the
harmonic basis via the commutator operator C = [S3, .] (which maps
T[l][m] -> m T[l][-m]) and the degree operator D (l on V_l).  The
variables
    Z3 = Z1 - D Z2,    Z4 = Z1 + (D + I) Z2
decouple, with flow-perturbation counterparts Y3 = Y1 - D Y2 and
Y4 = Y1 + (D + I) Y2 satisfying  Y3' + C Y3 = Z3,  Y4' + C Y4 = Z4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import BracketParams, ExtElement, _comm
from .quantization import HarmonicMatrixBasis, build_harmonic_basis


@dataclass
class JacobiState:
    """Velocity perturbation z = (Z2 stream, Z1 swirl) and flow
    perturbation y = (Y2, Y1), at time t."""

    z: ExtElement
    y: ExtElement
    t: float


def jacobi_rhs(js: JacobiState, background: ExtElement,
               params: BracketParams) -> JacobiState:
    """Time derivative of the linearized system; linear in js.

    Z1' = -k([P,Z1] + [Z2,B])
    Z2' = -Lap^{-1} k([Z2,Lap P] + [P,Lap Z2] + [P,Z1] + [Z2,B])
    Y1' = Z1 - k([B,Y2] + [P,Y1] - [P,Y2])
    Y2' = Z2 - k[P,Y2]
    """
    if js.z.n != background.n or background.n != params.n:
        raise ValueError("dimension mismatch in jacobi_rhs")
    k = params.hbar_scale
    lap = params.lap
    P, B = background.P, background.B
    Z2, Z1 = js.z.P, js.z.B
    Y2, Y1 = js.y.P, js.y.B

    Z1dot = -k * (_comm(P, Z1) + _comm(Z2, B))
    rhs = k * (_comm(Z2, lap.apply(P)) + _comm(P, lap.apply(Z2))
               + _comm(P, Z1) + _comm(Z2, B))
    Z2dot = -lap.solve_poisson(rhs)
    Y1dot = Z1 - k * (_comm(B, Y2) + _comm(P, Y1) - _comm(P, Y2))
    Y2dot = Z2 - k * _comm(P, Y2)
    return JacobiState(ExtElement(Z2dot, Z1dot), ExtElement(Y2dot, Y1dot), 1.0)


def steady_background(params: BracketParams) -> ExtElement:
    """The steady rotation P = B = hbar*S3."""
    h = params.spin.hbar
    return ExtElement(h * params.spin.S3.astype(complex),
                      h * params.spin.S3.astype(complex))


def _check_block(ell: int, m: int) -> None:
    if ell < 1:
        raise ValueError("block degree l must be >= 1")
    if abs(m) > ell:
        raise ValueError("|m| must be <= l")


def steady_jacobi_solution(ell: int, m: int, a0: tuple[float, float],
                           t: float) -> float:
    """Flow-perturbation coefficient c_{l,m}(t) of the Z3/Y3 branch.

    a0 = (a_{l,m}(0), a_{l,-m}(0)) are the velocity-perturbation
    coefficients; c(0) = 0.  The m = 0 coefficient grows linearly and
    never returns to zero.
    """
    _check_block(ell, m)
    if m == 0:
        return a0[0] * t
    w1 = m / (2.0 * (ell + 1))
    w2 = (2 * ell + 3) * m / (2.0 * (ell + 1))
    return (2.0 * (ell + 1) / m) * math.sin(w1 * t) * (
        a0[0] * math.cos(w2 * t) + a0[1] * math.sin(w2 * t))


def steady_jacobi_solution_d(ell: int, m: int, b0: tuple[float, float],
                             t: float) -> float:
    """Flow-perturbation coefficient d_{l,m}(t) of the Z4/Y4 branch."""
    _check_block(ell, m)
    if m == 0:
        raise ValueError("m = 0 has no oscillatory d-branch")
    w1 = m / (2.0 * ell)
    w2 = (2 * ell - 1) * m / (2.0 * ell)
    return (2.0 * ell / m) * math.sin(w1 * t) * (
        b0[0] * math.cos(w2 * t) + b0[1] * math.sin(w2 * t))


def conjugate_times(ell: int, m: int, k_max: int) -> list[tuple[float, int]]:
    """Sorted [(time, multiplicity)] of {4*pi*k*l/m} U {4*pi*k*(l+1)/m}.

    Each family contributes multiplicity 2; coincident times are summed.
    (These are the times at which both branch prefactors complete full
    periods; the individual branches also vanish at the odd half-period
    multiples 2*pi*(2k-1)*l/m and 2*pi*(2k-1)*(l+1)/m.)
    """
    _check_block(ell, m)
    if m < 1 or k_max < 1:
        raise ValueError("m >= 1 and k_max >= 1 required")
    acc: dict[float, int] = {}
    for fam in (ell, ell + 1):
        for k in range(1, k_max + 1):
            t = 4.0 * math.pi * k * fam / m
            key = round(t, 12)
            acc[key] = acc.get(key, 0) + 2
    return sorted(acc.items())


# -- variable transforms ----------------------------------------------------

def transform_Z34(z: ExtElement, params: BracketParams,
                  hbasis: HarmonicMatrixBasis) -> ExtElement:
    """(Z3, Z4) from (Z2 stream, Z1 swirl); returned as a plain pair
    with Z3 in the first slot and Z4 in the second (no stream/swirl
    invariants implied)."""
    lap = params.lap
    DZ2 = lap.apply_D(z.P, hbasis)
    return ExtElement(z.B - DZ2, z.B + DZ2 + z.P)


def transform_Y34(y: ExtElement, params: BracketParams,
                  hbasis: HarmonicMatrixBasis) -> ExtElement:
    """(Y3, Y4) by the same linear map (index-consistent form)."""
    return transform_Z34(y, params, hbasis)


def inverse_transform_Z34(z34: ExtElement, params: BracketParams,
                          hbasis: HarmonicMatrixBasis) -> ExtElement:
    """Invert (Z3, Z4) -> (Z2, Z1): Z4 - Z3 = (2D + I) Z2."""
    lap = params.lap
    diff = z34.B - z34.P
    Z2 = lap.apply_spectral_fn(
        diff, lambda lam: 1.0 / (2.0 * (np.sqrt(-lam + 0.25) - 0.5) + 1.0),
        hbasis)
    DZ2 = lap.apply_D(Z2, hbasis)
    return ExtElement(Z2, z34.P + DZ2)


# -- numerical conjugate-point detection ------------------------------------

def _branch_initial_z(ell: int, m: int, branch: str,
                      hbasis: HarmonicMatrixBasis,
                      which: int) -> ExtElement:
    """Velocity perturbation supported on one (l, +-m) block.

    branch 'c' sets Z4 = 0 (pure Z3), branch 'd' sets Z3 = 0 (pure Z4),
    'both' excites Z3 and Z4 together.  which selects T[l][m] (0) or
    T[l][-m] (1) as the block seed.
    """
    T = hbasis.matrix(ell, m if which == 0 else -m)
    if branch == "c":
        Z2 = -T / (2 * ell + 1)
        Z1 = (ell + 1) * T / (2 * ell + 1)
    elif branch == "d":
        Z2 = T / (2 * ell + 1)
        Z1 = ell * T / (2 * ell + 1)
    elif branch == "both":
        Z2 = T.copy()
        Z1 = T.copy()
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return ExtElement(Z2, Z1)


def _refine_minimum(ts: np.ndarray, vals: np.ndarray, i: int) -> float:
    """Vertex of the parabola through three points around a local min."""
    t0, t1, t2 = ts[i - 1], ts[i], ts[i + 1]
    v0, v1, v2 = vals[i - 1], vals[i], vals[i + 1]
    denom = (v0 - 2.0 * v1 + v2)
    if denom <= 0:
        return float(t1)
    return float(t1 + 0.5 * (v0 - v2) / denom * (t1 - t0))


def detect_conjugate_numerical(ell: int, m: int, n: int, dt: float,
                               t_max: float, branch: str = "both",
                               dip_ratio: float = 1e-5) -> list[float]:
    """Times where the flow perturbation returns to zero.

    Integrates jacobi_rhs (RK4) along the steady rotation with Y(0) = 0
    and two independent block-supported Z(0) seeds; a time counts only
    when both perturbations vanish together (multiplicity two).  Local
    minima of the squared norm are refined by quadratic interpolation;
    a minimum counts when its refined vertex norm is below dip_ratio
    times the running maximum.  (The sampled norm at a simple zero only
    reaches ~dt/period of the running maximum, so the tight threshold
    is applied to the interpolated vertex, not the raw sample.)
    """
    _check_block(ell, m)
    if m < 0 or ell > (n - 1) // 2:
        raise ValueError("block (l, m) not resolved at this n")
    params = BracketParams.build(n)
    hbasis = build_harmonic_basis(params.spin)
    bg = steady_background(params)

    states = [JacobiState(_branch_initial_z(ell, m, branch, hbasis, w),
                          ExtElement.zero(n), 0.0) for w in range(2)]
    if all(s.z.norm() == 0.0 for s in states):
        return []

    def rk4(js: JacobiState) -> JacobiState:
        def add(a: JacobiState, b: JacobiState, c: float) -> JacobiState:
            return JacobiState(a.z + c * b.z, a.y + c * b.y, a.t + c * b.t)
        k1 = jacobi_rhs(js, bg, params)
        k2 = jacobi_rhs(add(js, k1, dt / 2), bg, params)
        k3 = jacobi_rhs(add(js, k2, dt / 2), bg, params)
        k4 = jacobi_rhs(add(js, k3, dt), bg, params)
        out = add(add(add(add(js, k1, dt / 6), k2, dt / 3), k3, dt / 3),
                  k4, dt / 6)
        out.t = js.t + dt
        return out

    n_steps = int(math.ceil(t_max / dt))
    ts = np.empty(n_steps + 1)
    norms = np.empty(n_steps + 1)
    ts[0], norms[0] = 0.0, 0.0
    for i in range(1, n_steps + 1):
        states = [rk4(s) for s in states]
        ts[i] = states[0].t
        norms[i] = max(s.y.norm() for s in states)

    sq = norms ** 2
    detections: list[float] = []
    running_max = 0.0
    for i in range(1, n_steps):
        running_max = max(running_max, sq[i - 1])
        if running_max == 0.0:
            continue
        # coarse gate on the sample, tight gate on the fitted vertex
        if not (sq[i] <= sq[i - 1] and sq[i] <= sq[i + 1]
                and sq[i] <= 1e-4 * running_max):
            continue
        v0, v1, v2 = sq[i - 1], sq[i], sq[i + 1]
        denom = v0 - 2.0 * v1 + v2
        vertex = v1 - (v0 - v2) ** 2 / (8.0 * denom) if denom > 0 else v1
        if vertex <= dip_ratio ** 2 * running_max:
            detections.append(_refine_minimum(ts, sq, i))
    return detections
