"""The quantized Laplacian: fast apply, banded Poisson solves, spectral functions.

The operator maps every matrix diagonal to itself; on the offset-m band
it is real symmetric tridiagonal (see quantization.band_tridiagonal).
All bands with m >= 1 are negative definite and are factorized once into
a single block-diagonal banded Cholesky factor, giving O(n^2) solves.
The m = 0 band is singular (kernel = identity direction) and handled by
its precomputed eigendecomposition.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, eigh_tridiagonal

from .quantization import HarmonicMatrixBasis, SpinBasis, band_tridiagonal


class SingularOperatorError(ValueError):
    """A spectral function hit a singular eigenvalue (center direction)."""


class LaplacianOperator:
    """Precomputed band factorizations of the quantized Laplacian for one n."""

    def __init__(self, basis: SpinBasis):
        self.basis = basis
        self.n = n = basis.n
        s = basis.s
        j = basis.j
        c = basis.ladder_coeffs

        # vectorized apply: coefficient grids for the shift formula
        self._jj = 2.0 * np.outer(j, j) - 2.0 * s * (s + 1)
        self._cc = np.outer(c, c)

        # stacked Cholesky of -L over bands m = 1..n-1 (each negative definite)
        diags = []
        offs = []
        self._slices = []
        start = 0
        for m in range(1, n):
            d, e = band_tridiagonal(basis, m)
            diags.append(-d)
            offs.append(-e)
            offs.append(np.zeros(1))  # decouple adjacent blocks
            self._slices.append(slice(start, start + n - m))
            start += n - m
        total = start
        ab = np.zeros((2, total))
        ab[1] = np.concatenate(diags)
        ab[0, 1:] = np.concatenate(offs)[: total - 1]
        self._chol = cholesky_banded(ab, lower=False)

        # m = 0 band: eigendecomposition, kernel is the constant eigenvector
        d0, e0 = band_tridiagonal(basis, 0)
        w0, V0 = eigh_tridiagonal(d0, e0)
        order = np.argsort(-w0)  # l = 0 (eigenvalue 0) first
        self._w0 = w0[order]
        self._V0 = V0[:, order]
        self._w0[0] = 0.0  # exact kernel eigenvalue

    # -- apply ------------------------------------------------------------

    def apply(self, P: np.ndarray) -> np.ndarray:
        """Fast O(n^2) apply via the per-diagonal shift formula."""
        n = self.n
        if P.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrix, got {P.shape}")
        out = self._jj * P
        out[:-1, :-1] += self._cc * P[1:, 1:]
        out[1:, 1:] += self._cc * P[:-1, :-1]
        return out

    def apply_dense(self, P: np.ndarray) -> np.ndarray:
        """Reference triple-commutator definition (O(n^3)); for cross-checks."""
        n = self.n
        if P.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrix, got {P.shape}")
        out = np.zeros_like(P, dtype=complex)
        for S in (self.basis.S1, self.basis.S2, self.basis.S3):
            C = S @ P - P @ S
            out += S @ C - C @ S
        return out

    # -- solve ------------------------------------------------------------

    def solve_poisson(self, W: np.ndarray) -> np.ndarray:
        """Unique traceless P with apply(P) = W; requires tr W = 0."""
        n = self.n
        if W.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrix, got {W.shape}")
        tr = np.trace(W)
        if abs(tr) > 1e-10 * max(1.0, np.linalg.norm(W)):
            raise ValueError(
                f"solve_poisson requires a traceless right-hand side, tr = {tr}"
            )
        P = self._solve_once(W)
        # one pass of iterative refinement: the banded factors lose about
        # a digit to conditioning, which otherwise accumulates into a
        # visible secular drift over long fixed-point trajectories
        return P + self._solve_once(W - self.apply(P))

    def _solve_once(self, W: np.ndarray) -> np.ndarray:
        n = self.n
        P = np.zeros((n, n), dtype=complex)

        # m = 0 band through the spectral decomposition, kernel projected out
        b0 = np.diagonal(W).astype(complex)
        y = self._V0.T @ b0
        y[0] = 0.0
        with np.errstate(divide="ignore"):
            y[1:] = y[1:] / self._w0[1:]
        idx = np.arange(n)
        P[idx, idx] = self._V0 @ y

        # all m >= 1 bands in one stacked banded solve
        total = self._slices[-1].stop
        rhs = np.empty(total, dtype=complex)
        for m in range(1, n):
            rhs[self._slices[m - 1]] = np.diagonal(W, offset=-m)
        rhs_u = np.empty(total, dtype=complex)
        for m in range(1, n):
            rhs_u[self._slices[m - 1]] = np.diagonal(W, offset=m)
        sol = -cho_solve_banded((self._chol, False), np.stack([rhs, rhs_u], axis=1))
        for m in range(1, n):
            rows = np.arange(n - m) + m
            cols = np.arange(n - m)
            P[rows, cols] = sol[self._slices[m - 1], 0]
            P[cols, rows] = sol[self._slices[m - 1], 1]
        return P

    # -- spectral functions -----------------------------------------------

    def apply_spectral_fn(self, P: np.ndarray, f, hbasis: HarmonicMatrixBasis,
                          traceless_required: bool = False) -> np.ndarray:
        """Apply sum f(-l(l+1)) on the harmonic components of P.

        f is evaluated on the eigenvalues -l(l+1), l = 0..n-1.  A
        non-finite value of f on a populated eigenvalue raises
        SingularOperatorError.
        """
        n = self.n
        if P.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrix, got {P.shape}")
        ells = np.arange(n)
        vals = np.array([f(-float(l * (l + 1))) for l in ells], dtype=float)
        out = np.zeros((n, n), dtype=complex)
        for m in range(n):
            V = hbasis.vectors[m]
            fv = vals[m:]
            if m == 0:
                band = np.diagonal(P).astype(complex)
                proj = V.T @ band
                if not np.all(np.isfinite(fv)):
                    bad = ~np.isfinite(fv)
                    if np.any(np.abs(proj[bad]) > 1e-12 * max(1.0, np.linalg.norm(P))):
                        raise SingularOperatorError(
                            "spectral function singular on a populated eigenvalue"
                        )
                    proj = np.where(bad, 0.0, proj)
                    fv = np.where(bad, 0.0, fv)
                idx = np.arange(n)
                out[idx, idx] = V @ (fv * proj)
            else:
                if not np.all(np.isfinite(fv)):
                    raise SingularOperatorError(
                        "spectral function singular on a populated eigenvalue"
                    )
                for off, rows, cols in (
                    (-m, np.arange(n - m) + m, np.arange(n - m)),
                    (m, np.arange(n - m), np.arange(n - m) + m),
                ):
                    band = np.diagonal(P, offset=off).astype(complex)
                    out[rows, cols] = V @ (fv * (V.T @ band))
        return out

    def apply_D(self, P: np.ndarray, hbasis: HarmonicMatrixBasis) -> np.ndarray:
        """The degree operator: l on the V_l component.

        Equals sqrt(-Laplacian + I/4) - I/2; satisfies
        Laplacian = -D(I + D).
        """
        return self.apply_spectral_fn(
            P, lambda lam: np.sqrt(-lam + 0.25) - 0.5, hbasis
        )


def apply_laplacian(P: np.ndarray, op: LaplacianOperator) -> np.ndarray:
    return op.apply(P)


def solve_poisson(W: np.ndarray, op: LaplacianOperator) -> np.ndarray:
    return op.solve_poisson(W)
