"""The extended Lie algebra su(n) x u(n): bracket, ad, ad*, metric, curvature.

Elements are pairs (P, B): P traceless skew-Hermitian (the stream part),
B skew-Hermitian (the swirl part).  The bracket is the Abelian-extension
bracket with module action rho(P)B = k[P, B] and cocycle
b(P1, P2) = -k[P1, P2], where k is a configurable bracket scale
(1/hbar for the physical model, 1 for the small-n closed-form checks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .laplacian import LaplacianOperator
from .quantization import SpinBasis, build_harmonic_basis, build_spin_basis


@dataclass
class ExtElement:
    """A pair (P, B) in su(n) x u(n)."""

    P: np.ndarray
    B: np.ndarray

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def copy(self) -> "ExtElement":
        return ExtElement(self.P.copy(), self.B.copy())

    def __add__(self, other: "ExtElement") -> "ExtElement":
        return ExtElement(self.P + other.P, self.B + other.B)

    def __sub__(self, other: "ExtElement") -> "ExtElement":
        return ExtElement(self.P - other.P, self.B - other.B)

    def __mul__(self, a: float) -> "ExtElement":
        return ExtElement(a * self.P, a * self.B)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(np.linalg.norm(self.P) ** 2 + np.linalg.norm(self.B) ** 2))

    @classmethod
    def zero(cls, n: int) -> "ExtElement":
        return cls(np.zeros((n, n), dtype=complex), np.zeros((n, n), dtype=complex))

    def check(self, tol: float = 1e-10) -> None:
        scale = max(1.0, self.norm())
        if np.linalg.norm(self.P + self.P.conj().T) > tol * scale:
            raise ValueError("stream part is not skew-Hermitian")
        if abs(np.trace(self.P)) > tol * scale:
            raise ValueError("stream part is not traceless")
        if np.linalg.norm(self.B + self.B.conj().T) > tol * scale:
            raise ValueError("swirl part is not skew-Hermitian")


@dataclass
class BracketParams:
    """Spin basis, Laplacian, and the bracket scale for one matrix size."""

    spin: SpinBasis
    lap: LaplacianOperator
    hbar_scale: float  # multiplies every commutator; 1/hbar for dynamics

    @classmethod
    def build(cls, n: int, hbar_scale: float | None = None) -> "BracketParams":
        spin = build_spin_basis(n)
        lap = LaplacianOperator(spin)
        if hbar_scale is None:
            hbar_scale = 1.0 / spin.hbar
        if hbar_scale <= 0:
            raise ValueError("hbar_scale must be positive")
        return cls(spin=spin, lap=lap, hbar_scale=hbar_scale)

    @property
    def n(self) -> int:
        return self.spin.n


def _comm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def bracket_ext(x: ExtElement, y: ExtElement, params: BracketParams) -> ExtElement:
    """Abelian-extension bracket on su(n) x u(n)."""
    if x.n != y.n or x.n != params.n:
        raise ValueError("dimension mismatch in bracket_ext")
    k = params.hbar_scale
    pp = k * _comm(x.P, y.P)
    return ExtElement(pp, k * _comm(x.P, y.B) - k * _comm(y.P, x.B) - pp)


def ad_ext(x: ExtElement, y: ExtElement, params: BracketParams) -> ExtElement:
    """ad operator: the negative of the bracket (right-invariant setup)."""
    z = bracket_ext(x, y, params)
    return ExtElement(-z.P, -z.B)


def metric_ext(x: ExtElement, y: ExtElement, lap: LaplacianOperator) -> float:
    """tr(P1 Lap P2) - tr(B1 B2); positive definite on su(n) x u(n)."""
    if x.n != y.n:
        raise ValueError("dimension mismatch in metric_ext")
    val = np.trace(x.P @ lap.apply(y.P)) - np.trace(x.B @ y.B)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise ValueError(f"metric value has imaginary residue {val.imag}")
    return float(val.real)


def ad_star_ext(x: ExtElement, y: ExtElement, params: BracketParams) -> ExtElement:
    """Metric adjoint of ad: <ad*_x y, w> = <y, ad_x w>.

    Closed form derived by trace manipulation from the defining identity;
    the identity itself is the authoritative test.
    """
    if x.n != y.n or x.n != params.n:
        raise ValueError("dimension mismatch in ad_star_ext")
    k = params.hbar_scale
    lap = params.lap
    stream_rhs = k * (
        _comm(x.P, lap.apply(y.P)) + _comm(y.B, x.B) + _comm(x.P, y.B)
    )
    a = lap.solve_poisson(stream_rhs)
    b = k * _comm(x.P, y.B)
    return ExtElement(a, b)


def sectional_curvature(u: ExtElement, v: ExtElement,
                        params: BracketParams) -> float:
    """Unnormalized curvature numerator <R(u,v)v,u>.

    Assembled from the square-completed form of the Arnold formula:
    1/4 |ad*_u v + ad*_v u + ad_u v|^2 - <ad*_u v + ad_u v, ad_u v>
    - <ad*_u u, ad*_v v>.
    """
    lap = params.lap
    aduv = ad_ext(u, v, params)
    astar_uv = ad_star_ext(u, v, params)
    astar_vu = ad_star_ext(v, u, params)
    astar_uu = ad_star_ext(u, u, params)
    astar_vv = ad_star_ext(v, v, params)
    w = astar_uv + astar_vu + aduv
    return (
        0.25 * metric_ext(w, w, lap)
        - metric_ext(astar_uv + aduv, aduv, lap)
        - metric_ext(astar_uu, astar_vv, lap)
    )


def normalized_sectional_curvature(u: ExtElement, v: ExtElement,
                                   params: BracketParams) -> float:
    lap = params.lap
    uu = metric_ext(u, u, lap)
    vv = metric_ext(v, v, lap)
    uv = metric_ext(u, v, lap)
    denom = uu * vv - uv * uv
    if denom <= 1e-14 * max(uu * vv, 1.0):
        raise ValueError("degenerate plane: u and v are parallel or zero")
    return sectional_curvature(u, v, params) / denom


def orthonormal_basis(params: BracketParams):
    """Metric-orthonormal basis of su(n) x u(n).

    Stream directions (T[l][m]/sqrt(l(l+1)), 0) for l >= 1 and swirl
    directions (0, T[l][m]) for l >= 0.
    """
    n = params.n
    hbasis = build_harmonic_basis(params.spin)
    basis = []
    for ell in range(n):
        for m in range(-ell, ell + 1):
            T = hbasis.matrix(ell, m)
            if ell >= 1:
                basis.append(ExtElement(T / np.sqrt(ell * (ell + 1)),
                                        np.zeros_like(T)))
            basis.append(ExtElement(np.zeros_like(T), T))
    return basis


def ricci(z: ExtElement, params: BracketParams,
          basis: list | None = None) -> float:
    """Ricci curvature: sum of sectional numerators over an orthonormal basis."""
    if basis is None:
        basis = orthonormal_basis(params)
    return sum(sectional_curvature(e, z, params) for e in basis)


def ricci_signature_n2():
    """Inertia (pos, neg, zero) of the Ricci form on su(2) x u(2).

    Uses bracket scale 1 so the closed-form cross-product identification
    applies.  Also returns the eigenvector of the zero eigenvalue.
    """
    params = BracketParams.build(2, hbar_scale=1.0)
    basis = orthonormal_basis(params)
    dim = len(basis)
    lap = params.lap

    def ric_bilinear(a: ExtElement, b: ExtElement) -> float:
        return 0.25 * (ricci(a + b, params, basis) - ricci(a - b, params, basis))

    # Gram matrix of the metric is the identity in this basis
    R = np.zeros((dim, dim))
    for i in range(dim):
        for j_ in range(i, dim):
            R[i, j_] = R[j_, i] = ric_bilinear(basis[i], basis[j_])
    w, V = np.linalg.eigh(R)
    tol = 1e-8 * max(1.0, np.abs(w).max())
    pos = int(np.sum(w > tol))
    neg = int(np.sum(w < -tol))
    zero = dim - pos - neg
    k = int(np.argmin(np.abs(w)))
    null_vec = ExtElement.zero(2)
    for i in range(dim):
        null_vec = null_vec + float(V[i, k]) * basis[i]
    return (pos, neg, zero), w, null_vec
