"""Conserved and monitored quantities of the matrix flow.

Energy, the trace Casimirs C_k = tr((iB)^k) and I_k = i tr((iB)^k Lap P),
the vorticity sup-norm, and the extreme eigenvalues of iB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import BracketParams, ExtElement, metric_ext
from .laplacian import LaplacianOperator
from .quantization import SpinBasis

#: above this size, lambda_max uses power iteration instead of a full solve
_POWER_ITER_THRESHOLD = 256


@dataclass
class DiagnosticsRecord:
    t: float
    energy: float
    supnorm: float
    c2: float
    c3: float
    c4: float
    i1: float
    i2: float
    b_eig_min: float
    b_eig_max: float

    def validate(self) -> None:
        vals = [self.energy, self.supnorm, self.c2, self.c3, self.c4,
                self.i1, self.i2, self.b_eig_min, self.b_eig_max]
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("non-finite diagnostic value")
        if self.energy < 0 or self.supnorm < 0:
            raise ValueError("energy and supnorm must be nonnegative")


def _real(val: complex, what: str) -> float:
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ValueError(f"{what} has imaginary residue {val.imag}")
    return float(val.real)


def energy(x: ExtElement, lap: LaplacianOperator) -> float:
    """tr(P Lap P) - tr(B^2) >= 0."""
    return metric_ext(x, x, lap)


def casimir_C(x: ExtElement, k: int) -> float:
    """tr((iB)^k); conserved because B evolves by conjugation."""
    if k < 1:
        raise ValueError("k must be >= 1")
    H = 1j * x.B
    return _real(complex(np.trace(np.linalg.matrix_power(H, k))), "casimir_C")


def casimir_I(x: ExtElement, k: int, lap: LaplacianOperator) -> float:
    """i tr((iB)^k Lap P); the swirl-weighted circulation Casimirs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    H = 1j * x.B
    val = 1j * np.trace(np.linalg.matrix_power(H, k) @ lap.apply(x.P))
    return _real(complex(val), "casimir_I")


def _lambda_max_hermitian(M: np.ndarray, tol: float = 1e-10) -> float:
    n = M.shape[0]
    if n <= _POWER_ITER_THRESHOLD:
        return float(np.linalg.eigvalsh(M)[-1])
    # power iteration on the PSD matrix (largest eigenvalue dominant)
    rng = np.random.default_rng(0)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(10_000):
        w = M @ v
        lam_new = float(np.real(v.conj() @ w))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    return lam


def vorticity_supnorm(x: ExtElement, basis: SpinBasis,
                      lap: LaplacianOperator) -> float:
    """sqrt(lambda_max(M)) with M = -(Lap P + B)^2 - sum_a [S_a, B]^2.

    M is Hermitian positive semidefinite (each term is minus the square
    of a skew-Hermitian matrix).
    """
    W = lap.apply(x.P) + x.B
    M = -(W @ W)
    for S in (basis.S1, basis.S2, basis.S3):
        C = S @ x.B - x.B @ S
        M -= C @ C
    M = 0.5 * (M + M.conj().T)
    lam = _lambda_max_hermitian(M)
    return float(np.sqrt(max(lam, 0.0)))


def collect(x: ExtElement, t: float, params: BracketParams) -> DiagnosticsRecord:
    """All monitored quantities at one sampling time; pure."""
    lap = params.lap
    w = np.linalg.eigvalsh(1j * x.B)
    rec = DiagnosticsRecord(
        t=t,
        energy=energy(x, lap),
        supnorm=vorticity_supnorm(x, params.spin, lap),
        c2=casimir_C(x, 2),
        c3=casimir_C(x, 3),
        c4=casimir_C(x, 4),
        i1=casimir_I(x, 1, lap),
        i2=casimir_I(x, 2, lap),
        b_eig_min=float(w[0]),
        b_eig_max=float(w[-1]),
    )
    rec.validate()
    return rec
