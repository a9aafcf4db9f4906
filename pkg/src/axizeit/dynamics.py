"""Time evolution of the matrix flow on su(n) x u(n).

The vector field is
    P' = -Lap^{-1}( k [P, Lap P + B] ),    B' = -k [P, B],    k = 1/hbar.

Two one-step maps are provided: a structure-preserving scheme that
updates B by an exact similarity transform (so the spectrum of B, and
with it every trace Casimir, is conserved to solver tolerance) and a
classical RK4 reference integrator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .algebra import BracketParams, ExtElement, _comm

logger = logging.getLogger(__name__)

#: symmetrization drift beyond this aborts the run (numerical blow-up)
DRIFT_ABORT = 1e-8


class StepFailure(RuntimeError):
    """The implicit stage did not converge (or invariants drifted too far).

    Carries the last residual and, when raised from run_simulation, the
    last good state in ``last_state``.
    """

    def __init__(self, message: str, residual: float,
                 last_state: "SimState | None" = None):
        super().__init__(message)
        self.residual = residual
        self.last_state = last_state


@dataclass
class SimState:
    """Time and the pair (P, B)."""

    t: float
    x: ExtElement


@dataclass
class IntegratorConfig:
    dt: float
    method: str = "structure_preserving"
    fixed_point_tol: float = 1e-12
    max_fixed_point_iters: int = 100

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.fixed_point_tol <= 0:
            raise ValueError("fixed_point_tol must be positive")
        if self.method not in ("structure_preserving", "rk4_reference"):
            raise ValueError(f"unknown method {self.method!r}")


def default_dt(n: int) -> float:
    """Resolution-scaled default step: refines time as n grows."""
    return 0.05 * (512.0 / n)


def euler_arnold_rhs(x: ExtElement, params: BracketParams) -> ExtElement:
    """(P', B') of the flow; P' is traceless skew-Hermitian."""
    if x.n != params.n:
        raise ValueError("dimension mismatch in euler_arnold_rhs")
    k = params.hbar_scale
    lap = params.lap
    W = lap.apply(x.P)
    Pdot = -lap.solve_poisson(k * _comm(x.P, W + x.B))
    Bdot = -k * _comm(x.P, x.B)
    return ExtElement(Pdot, Bdot)


def _project(x: ExtElement) -> tuple[ExtElement, float]:
    """Skew-Hermitian / traceless projection; returns the drift removed."""
    P = 0.5 * (x.P - x.P.conj().T)
    P = P - (np.trace(P) / x.n) * np.eye(x.n)
    B = 0.5 * (x.B - x.B.conj().T)
    drift = max(np.linalg.norm(P - x.P), np.linalg.norm(B - x.B))
    return ExtElement(P, B), float(drift)


def _cayley(X: np.ndarray) -> np.ndarray:
    """(I - X/2)^{-1} (I + X/2); unitary for skew-Hermitian X."""
    n = X.shape[0]
    I = np.eye(n)
    return np.linalg.solve(I - 0.5 * X, I + 0.5 * X)


def step_structure_preserving(s: SimState, cfg: IntegratorConfig,
                              params: BracketParams) -> SimState:
    """One step of the isospectral midpoint/Cayley scheme.

    Internally advances W = Lap P.  The stage matrix A solves the
    fixed-point problem
        W~ = W + (dt/2) [A, W + B],    A = -k Lap^{-1} W~,
    and the update conjugates by the Cayley transform Q of dt*A:
        B+ = Q B Q*,   W+ = Q (W + dt [A, B]) Q*,   P+ = Lap^{-1} W+.
    B+ is an exact similarity transform of B, and the correction dt[A,B]
    turns into a commutator with B+ after conjugation, so all traces
    tr(f(iB) W) are conserved up to the fixed-point tolerance.
    """
    lap = params.lap
    k = params.hbar_scale
    dt = cfg.dt
    P, B = s.x.P, s.x.B
    W = lap.apply(P)

    A = -k * P  # initial guess: A at the left endpoint
    residual = np.inf
    for _ in range(cfg.max_fixed_point_iters):
        Wt = W + 0.5 * dt * _comm(A, W + B)
        A_new = -k * lap.solve_poisson(Wt)
        residual = float(np.linalg.norm(A_new - A))
        A = A_new
        if residual <= cfg.fixed_point_tol:
            break
    else:
        raise StepFailure(
            f"fixed-point stage did not reach {cfg.fixed_point_tol} in "
            f"{cfg.max_fixed_point_iters} iterations", residual)

    Q = _cayley(dt * A)
    Qh = Q.conj().T
    B_new = Q @ B @ Qh
    W_new = Q @ (W + dt * _comm(A, B)) @ Qh
    P_new = lap.solve_poisson(W_new)

    x_new, drift = _project(ExtElement(P_new, B_new))
    if drift > DRIFT_ABORT:
        raise StepFailure(f"invariant drift {drift:.3e} exceeds abort "
                          f"threshold {DRIFT_ABORT}", drift)
    if drift > 1e-12:
        logger.debug("symmetrization drift %.3e at t=%g", drift, s.t)
    return SimState(s.t + dt, x_new)


def step_rk4_reference(s: SimState, cfg: IntegratorConfig,
                       params: BracketParams) -> SimState:
    """Classical RK4 on (P, B); 4th order, Casimirs only approximate."""
    dt = cfg.dt
    x = s.x
    k1 = euler_arnold_rhs(x, params)
    k2 = euler_arnold_rhs(x + 0.5 * dt * k1, params)
    k3 = euler_arnold_rhs(x + 0.5 * dt * k2, params)
    k4 = euler_arnold_rhs(x + dt * k3, params)
    x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    x_new, drift = _project(x_new)
    if drift > DRIFT_ABORT:
        raise StepFailure(f"invariant drift {drift:.3e} exceeds abort "
                          f"threshold {DRIFT_ABORT}", drift)
    return SimState(s.t + dt, x_new)


_STEPPERS = {
    "structure_preserving": step_structure_preserving,
    "rk4_reference": step_rk4_reference,
}


def run_simulation(initial: ExtElement, params: BracketParams,
                   cfg: IntegratorConfig, t_end: float,
                   callback=None, callback_every: int = 1) -> SimState:
    """Step from t=0 to t_end; callback(state) at the given step cadence.

    The callback is invoked on the initial state and after every
    callback_every-th step (and on the final state).  A StepFailure is
    re-raised with the last good state attached.
    """
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    step = _STEPPERS[cfg.method]
    state = SimState(0.0, initial.copy())
    if callback is not None:
        callback(state)
    n_steps = int(round(t_end / cfg.dt))
    for i in range(n_steps):
        try:
            state = step(state, cfg, params)
        except StepFailure as err:
            err.last_state = state
            raise
        if callback is not None and ((i + 1) % callback_every == 0
                                     or i + 1 == n_steps):
            callback(state)
    return state


def exact_solution_n2(x0: ExtElement, t: float,
                      params: BracketParams) -> ExtElement:
    """Analytic solution for n = 2: rigid rotation generated by P0 + B0/2.

    With hbar*L = P(0) + B(0)/2, both parts are conjugated by the same
    one-parameter unitary group:
        P(t) = e^{-tL} P(0) e^{tL},    B(t) = e^{-tL} B(0) e^{tL}.
    (Direct differentiation: B' = -[L,B] = -k[P,B] and, since the
    Laplacian is -2I on traceless 2x2 matrices, P' = -[L,P] = (k/2)[P,B].)
    """
    if x0.n != 2 or params.n != 2:
        raise ValueError("exact_solution_n2 requires n = 2")
    L = params.hbar_scale * (x0.P + 0.5 * x0.B)
    U = expm(-t * L)
    Uh = U.conj().T
    return ExtElement(U @ x0.P @ Uh, U @ x0.B @ Uh)
