import numpy as np
import numpy.testing as npt
import pytest

from axizeit.laplacian import LaplacianOperator, SingularOperatorError
from axizeit.quantization import build_harmonic_basis, build_spin_basis

from conftest import params_cached, random_skew


@pytest.mark.parametrize("n", [2, 3, 8, 17, 64])
def test_fast_apply_matches_dense(n, rng):
    p = params_cached(n)
    for _ in range(5):
        M = random_skew(n, rng)
        npt.assert_allclose(p.lap.apply(M), p.lap.apply_dense(M), atol=1e-12)


@pytest.mark.parametrize("n", [2, 5, 16, 64])
def test_solve_poisson_residual(n, rng):
    p = params_cached(n)
    for _ in range(10):
        W = random_skew(n, rng, traceless=True)
        P = p.lap.solve_poisson(W)
        npt.assert_allclose(p.lap.apply(P), W,
                            atol=1e-10 * np.linalg.norm(W))
        # traceless representative of the solution family
        assert abs(np.trace(P)) < 1e-10 * np.linalg.norm(P)


def test_solve_poisson_preserves_skewness(rng):
    p = params_cached(12)
    W = random_skew(12, rng, traceless=True)
    P = p.lap.solve_poisson(W)
    npt.assert_allclose(P, -P.conj().T, atol=1e-11)


def test_solve_poisson_rejects_trace(rng):
    p = params_cached(6)
    with pytest.raises(ValueError, match="traceless"):
        p.lap.solve_poisson(1j * np.eye(6))


def test_kernel_is_identity_direction():
    p = params_cached(7)
    npt.assert_allclose(p.lap.apply(1j * np.eye(7)), np.zeros((7, 7)),
                        atol=1e-12)


def test_spectral_fn_identity(rng):
    p = params_cached(8)
    hb = build_harmonic_basis(p.spin)
    M = random_skew(8, rng)
    npt.assert_allclose(p.lap.apply_spectral_fn(M, lambda lam: lam, hb),
                        p.lap.apply(M), atol=1e-11)


def test_spectral_fn_inverse_on_mean_free(rng):
    p = params_cached(8)
    hb = build_harmonic_basis(p.spin)
    W = random_skew(8, rng, traceless=True)
    # remove the constant component so 1/lam is finite where populated
    W = W - (np.trace(W) / 8) * np.eye(8)
    P = p.lap.solve_poisson(W)
    Q = p.lap.apply_spectral_fn(
        W, lambda lam: 1 / lam if lam != 0 else np.inf, hb)
    npt.assert_allclose(Q, P, atol=1e-10)


def test_spectral_fn_singular_raises(rng):
    p = params_cached(8)
    hb = build_harmonic_basis(p.spin)
    M = 1j * np.eye(8)  # populated constant component
    with pytest.raises(SingularOperatorError):
        p.lap.apply_spectral_fn(M, lambda lam: 1 / lam if lam != 0 else np.inf,
                                hb)


def test_degree_operator(rng):
    p = params_cached(9)
    hb = build_harmonic_basis(p.spin)
    for ell, m in [(0, 0), (1, 1), (4, -2), (8, 8)]:
        T = hb.matrix(ell, m)
        npt.assert_allclose(p.lap.apply_D(T, hb), ell * T, atol=1e-10)


def test_solve_cost_scaling():
    # measured exponent of solve_poisson cost in n should be ~2
    import time
    sizes = [64, 128, 256, 512]
    times = []
    rng = np.random.default_rng(0)
    for n in sizes:
        p = params_cached(n)
        W = random_skew(n, rng, traceless=True)
        p.lap.solve_poisson(W)  # warm up
        # best of several samples: robust against scheduler noise
        samples = []
        for _ in range(5):
            t0 = time.perf_counter()
            for _ in range(3):
                p.lap.solve_poisson(W)
            samples.append((time.perf_counter() - t0) / 3)
        times.append(min(samples))
    slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
    assert 1.5 < slope < 2.6, f"solve cost exponent {slope:.2f}"
