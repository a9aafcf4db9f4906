"""Spin-matrix representation and the harmonic matrix basis.

The building blocks are the three spin matrices S1, S2, S3 of size n
(indices labelled j = -s..s with s = (n-1)/2) together with the scale
hbar = 2/sqrt(n^2-1).  The adjoint action of the spin matrices on u(n)
decomposes into irreducible blocks V_0, ..., V_{n-1}; each block carries
a (2l+1)-dimensional family of skew-Hermitian basis matrices T[l][m],
the matrix analogue of the real spherical harmonics.

Basis convention (ours to fix; the relevant property is internal
consistency):

* every T[l][m] is supported on the matrix diagonals at offset +-|m|
  and has unit Frobenius norm, tr(T^dagger T) = 1;
* ad_{S3} T[l][m] = m T[l][-m] for all -l <= m <= l;
* for m > 0, T[l][m] is the real antisymmetric combination and
  T[l][-m] the purely imaginary symmetric one; T[l][0] = i diag(v);
* the residual +-1 per (l, m) is fixed by positive overlap of the band
  profile with (-1)^m P_l^m(hbar(j + m/2)), which aligns T[0][0] with
  +i I/sqrt(n) and T[1][0] with +S3/||S3||_F.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import lpmv, sph_harm_y


@dataclass(frozen=True)
class SpinBasis:
    """The spin matrices for size n and the associated scale hbar."""

    n: int
    s: float
    hbar: float
    S1: np.ndarray
    S2: np.ndarray
    S3: np.ndarray

    @property
    def j(self) -> np.ndarray:
        """Index labels -s, -s+1, ..., s of the preferred basis."""
        return np.arange(self.n) - self.s

    @property
    def ladder_coeffs(self) -> np.ndarray:
        """c_j = sqrt(s(s+1) - j(j+1)) for j = -s..s-1 (length n-1)."""
        j = self.j[:-1]
        return np.sqrt(self.s * (self.s + 1) - j * (j + 1))


def build_spin_basis(n: int) -> SpinBasis:
    """Construct the spin matrices S1, S2, S3 of size n.

    S1 is purely imaginary symmetric, S2 purely real antisymmetric,
    S3 = i diag(j); they satisfy [S1,S2]=S3 and cyclic permutations.
    """
    if n < 2:
        raise ValueError(f"spin basis requires n >= 2, got {n}")
    s = (n - 1) / 2.0
    j = np.arange(n) - s
    c = np.sqrt(s * (s + 1) - j[:-1] * (j[:-1] + 1))

    S1 = np.zeros((n, n), dtype=complex)
    S2 = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    S1[idx, idx + 1] = 0.5j * c
    S1[idx + 1, idx] = 0.5j * c
    S2[idx, idx + 1] = 0.5 * c
    S2[idx + 1, idx] = -0.5 * c
    S3 = np.diag(1j * j)

    hbar = 2.0 / np.sqrt(n * n - 1.0)
    return SpinBasis(n=n, s=s, hbar=hbar, S1=S1, S2=S2, S3=S3)


def quantized_gradient(B: np.ndarray, basis: SpinBasis):
    """The three commutators ([S1,B], [S2,B], [S3,B])."""
    if B.shape != (basis.n, basis.n):
        raise ValueError(f"expected {basis.n}x{basis.n} matrix, got {B.shape}")
    return tuple(S @ B - B @ S for S in (basis.S1, basis.S2, basis.S3))


def band_tridiagonal(basis: SpinBasis, m: int):
    """Diagonal and off-diagonal of the Laplacian on the offset-m band.

    The quantized Laplacian maps each matrix diagonal to itself.  On the
    band of entries (j+m, j), j = -s..s-m, it acts as the real symmetric
    tridiagonal operator

        (Lu)_j = (-2s(s+1) + 2 j(j+m)) u_j
                 + c_{j+m-1} c_{j-1} u_{j-1} + c_{j+m} c_j u_{j+1},

    obtained by applying the double-commutator definition to elementary
    matrices.  Returns (diag, offdiag) with len(diag) = n - m.
    """
    n, s = basis.n, basis.s
    m = abs(m)
    jcol = np.arange(n - m) - s
    diag = -2.0 * s * (s + 1) + 2.0 * jcol * (jcol + m)
    c = basis.ladder_coeffs
    # coupling u_j <-> u_{j+1} has weight c_{j+m} c_j
    offdiag = c[m:] * c[: n - m - 1] if n - m >= 2 else np.zeros(0)
    return diag, offdiag


@dataclass(frozen=True)
class HarmonicMatrixBasis:
    """Band-compressed orthonormal harmonic basis of u(n).

    vectors[m] is an (n-m) x (n-m) orthogonal matrix whose column
    (l - m) holds the band profile of T[l][+-m]; degrees[m] lists the
    corresponding l values m..n-1.
    """

    n: int
    spin: SpinBasis
    vectors: tuple  # tuple of ndarray, index m = 0..n-1
    degrees: tuple  # tuple of ndarray of l values per m

    def band_profile(self, ell: int, m: int) -> np.ndarray:
        m = abs(m)
        if not (0 <= m <= ell <= self.n - 1):
            raise ValueError(f"invalid (l, m) = ({ell}, {m}) for n = {self.n}")
        return self.vectors[m][:, ell - m]

    def matrix(self, ell: int, m: int) -> np.ndarray:
        """Materialize T[l][m] as a dense skew-Hermitian matrix."""
        n = self.n
        v = self.band_profile(ell, m)
        T = np.zeros((n, n), dtype=complex)
        rows = np.arange(n - abs(m)) + abs(m)
        cols = np.arange(n - abs(m))
        if m == 0:
            T[cols, cols] = 1j * v
        elif m > 0:
            # real antisymmetric: +v/sqrt2 on subdiagonal m, -v/sqrt2 above
            T[rows, cols] = v / np.sqrt(2)
            T[cols, rows] = -v / np.sqrt(2)
        else:
            # purely imaginary symmetric
            T[rows, cols] = 1j * v / np.sqrt(2)
            T[cols, rows] = 1j * v / np.sqrt(2)
        return T


def build_harmonic_basis(basis: SpinBasis) -> HarmonicMatrixBasis:
    """Diagonalize the Laplacian band by band and fix signs.

    Eigenvalues of the offset-m band operator are -l(l+1), l = m..n-1,
    all simple; the eigenvectors are the band profiles of T[l][+-m].
    """
    n, s, hbar = basis.n, basis.s, basis.hbar
    vectors = []
    degrees = []
    for m in range(n):
        diag, off = band_tridiagonal(basis, m)
        if len(diag) == 1:
            V = np.ones((1, 1))
        else:
            _, V = eigh_tridiagonal(diag, off)
            V = V[:, ::-1]  # ascending l (eigenvalues -l(l+1) descend in l)
        ells = np.arange(m, n)
        # sign convention: positive overlap with the associated-Legendre
        # profile sampled at the band midpoints
        x = np.clip(hbar * ((np.arange(n - m) - s) + m / 2.0), -1.0, 1.0)
        for k, ell in enumerate(ells):
            with np.errstate(over="ignore", invalid="ignore"):
                ref = (-1.0) ** m * lpmv(m, ell, x)
                ov = (float(V[:, k] @ ref)
                      if np.all(np.isfinite(ref)) else np.nan)
            if not np.isfinite(ov) or abs(ov) < 1e-9:
                # Legendre magnitudes overflow for large m; fall back to
                # a sign fixed by the largest band-profile component
                ov = V[np.argmax(np.abs(V[:, k])), k]
            if ov < 0:
                V[:, k] = -V[:, k]
        vectors.append(np.ascontiguousarray(V))
        degrees.append(ells)
    return HarmonicMatrixBasis(
        n=n, spin=basis, vectors=tuple(vectors), degrees=tuple(degrees)
    )


@dataclass
class HarmonicCoeffs:
    """Real coefficients a[l][m], 0 <= l <= lmax, |m| <= l.

    Stored as a dense (lmax+1) x (2 lmax + 1) array with column index
    m + lmax; entries outside |m| <= l are zero.
    """

    lmax: int
    a: np.ndarray

    @classmethod
    def zeros(cls, lmax: int) -> "HarmonicCoeffs":
        return cls(lmax=lmax, a=np.zeros((lmax + 1, 2 * lmax + 1)))

    def __getitem__(self, lm) -> float:
        ell, m = lm
        self._check(ell, m)
        return float(self.a[ell, m + self.lmax])

    def __setitem__(self, lm, value: float) -> None:
        ell, m = lm
        self._check(ell, m)
        self.a[ell, m + self.lmax] = value

    def _check(self, ell: int, m: int) -> None:
        if not (0 <= ell <= self.lmax and abs(m) <= ell):
            raise ValueError(f"invalid (l, m) = ({ell}, {m}), lmax = {self.lmax}")


class TruncationError(ValueError):
    """Coefficient degree exceeds what a size-n basis can represent."""


def quantize(coeffs: HarmonicCoeffs, hbasis: HarmonicMatrixBasis) -> np.ndarray:
    """Assemble sum_{l,m} a[l][m] T[l][m] band by band; O(n^2)."""
    n = hbasis.n
    if coeffs.lmax > n - 1:
        raise TruncationError(
            f"lmax = {coeffs.lmax} exceeds n-1 = {n - 1}; truncate explicitly"
        )
    lmax = coeffs.lmax
    M = np.zeros((n, n), dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2)
    for m in range(lmax + 1):
        V = hbasis.vectors[m]
        nl = lmax - m + 1  # coefficients present for this band
        if m == 0:
            amp = coeffs.a[:, lmax]  # a[l][0], l = 0..lmax
            band = V[:, :nl] @ amp
            idx = np.arange(n)
            M[idx, idx] += 1j * band
        else:
            ap = coeffs.a[m : lmax + 1, lmax + m]   # a[l][+m]
            am = coeffs.a[m : lmax + 1, lmax - m]   # a[l][-m]
            band = V[:, :nl] @ (inv_sqrt2 * (ap + 1j * am))
            rows = np.arange(n - m) + m
            cols = np.arange(n - m)
            M[rows, cols] += band
            M[cols, rows] += -np.conj(band)
    return M


def dequantize(M: np.ndarray, hbasis: HarmonicMatrixBasis) -> HarmonicCoeffs:
    """Adjoint of quantize: a[l][m] = tr(T[l][m]^dagger M)."""
    n = hbasis.n
    if M.shape != (n, n):
        raise ValueError(f"expected {n}x{n} matrix, got {M.shape}")
    if np.linalg.norm(M + M.conj().T) > 1e-10 * max(1.0, np.linalg.norm(M)):
        raise ValueError("dequantize expects a skew-Hermitian matrix")
    lmax = n - 1
    out = HarmonicCoeffs.zeros(lmax)
    sqrt2 = np.sqrt(2)
    for m in range(n):
        V = hbasis.vectors[m]
        if m == 0:
            band = np.diagonal(M).imag
            out.a[:, lmax] = V.T @ band
        else:
            band = np.diagonal(M, offset=-m)  # entries (j+m, j)
            proj = V.T @ band
            out.a[m:, lmax + m] = sqrt2 * proj.real
            out.a[m:, lmax - m] = sqrt2 * proj.imag
    return out


@lru_cache(maxsize=8)
def _real_sph_grid(lmax: int, nlat: int, nlon: int) -> np.ndarray:
    """Table Y[l, m+lmax, i, j] of real spherical harmonics on the grid."""
    theta = (np.arange(nlat) + 0.5) * np.pi / nlat
    phi = 2.0 * np.pi * np.arange(nlon) / nlon
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    out = np.zeros((lmax + 1, 2 * lmax + 1, nlat, nlon))
    for ell in range(lmax + 1):
        for m in range(ell + 1):
            ylm = sph_harm_y(ell, m, th, ph)  # complex Y_l^m(theta, phi)
            if m == 0:
                out[ell, lmax] = ylm.real
            else:
                fac = np.sqrt(2.0) * (-1.0) ** m
                out[ell, lmax + m] = fac * ylm.real
                out[ell, lmax - m] = fac * ylm.imag
    return out


def grid_eval(coeffs: HarmonicCoeffs, nlat: int, nlon: int) -> np.ndarray:
    """Evaluate the coefficient expansion on the midpoint lat-lon grid.

    Latitudes theta_i = (i + 1/2) pi / nlat, longitudes phi_j = 2 pi j / nlon.
    Real harmonics are orthonormal with Y_{0,0} = 1/sqrt(4 pi); m > 0 are
    the cos(m phi) family, m < 0 the sin(m phi) family.
    """
    if nlat < 2 or nlon < 2:
        raise ValueError("grid_eval requires nlat, nlon >= 2")
    table = _real_sph_grid(coeffs.lmax, nlat, nlon)
    return np.tensordot(coeffs.a, table, axes=2)
