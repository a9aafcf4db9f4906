import dataclasses

import numpy as np
import numpy.testing as npt
import pytest

from axizeit.algebra import ExtElement
from axizeit.diagnostics import (DiagnosticsRecord, casimir_C, casimir_I,
                                 collect, energy, vorticity_supnorm)
from axizeit.dynamics import IntegratorConfig, SimState, run_simulation
from axizeit.quantization import build_harmonic_basis

from conftest import params_cached, random_ext


def zero_state(n):
    z = np.zeros((n, n), complex)
    return ExtElement(z, z.copy())


def steady_state(p):
    return ExtElement(p.spin.hbar * p.spin.S3, p.spin.hbar * p.spin.S3)


class TestEnergy:
    def test_zero(self):
        p = params_cached(5)
        assert energy(zero_state(5), p.lap) == 0.0

    def test_unit_stream_mode(self):
        # stream part equal to a degree-1 eigenmatrix carries energy
        # l(l+1) = 2
        p = params_cached(6)
        hb = build_harmonic_basis(p.spin)
        x = ExtElement(hb.matrix(1, 0), np.zeros((6, 6), complex))
        assert energy(x, p.lap) == pytest.approx(2.0, abs=1e-12)

    def test_unit_swirl_mode(self):
        p = params_cached(6)
        hb = build_harmonic_basis(p.spin)
        x = ExtElement(np.zeros((6, 6), complex), hb.matrix(0, 0))
        assert energy(x, p.lap) == pytest.approx(1.0, abs=1e-12)

    def test_positive(self, rng):
        p = params_cached(7)
        for _ in range(10):
            assert energy(random_ext(7, rng), p.lap) > 0


class TestCasimirs:
    def test_c_zero_swirl(self):
        p = params_cached(4)
        assert casimir_C(zero_state(4), 2) == 0.0

    def test_c1_is_trace(self, rng):
        x = random_ext(5, rng)
        assert casimir_C(x, 1) == pytest.approx(
            (1j * np.trace(x.B)).real, abs=1e-12)

    def test_c2_steady_n2(self):
        p = params_cached(2)
        x = steady_state(p)
        # iB has eigenvalues +-hbar/2 with hbar = 2/sqrt(3)
        assert casimir_C(x, 2) == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_i_zero_stream(self, rng):
        p = params_cached(4)
        x = ExtElement(np.zeros((4, 4), complex),
                       random_ext(4, rng).B)
        assert casimir_I(x, 1, p.lap) == 0.0

    def test_i1_central_swirl_vanishes(self, rng):
        p = params_cached(5)
        x = ExtElement(random_ext(5, rng).P, 0.8j * np.eye(5))
        assert casimir_I(x, 1, p.lap) == pytest.approx(0.0, abs=1e-12)

    def test_k_validation(self, rng):
        p = params_cached(3)
        x = random_ext(3, rng)
        with pytest.raises(ValueError):
            casimir_C(x, 0)
        with pytest.raises(ValueError):
            casimir_I(x, 0, p.lap)


class TestSupnorm:
    def test_zero(self):
        p = params_cached(5)
        assert vorticity_supnorm(zero_state(5), p.spin, p.lap) == 0.0

    def test_zero_swirl_reduces_to_spectral_norm(self, rng):
        p = params_cached(8)
        x = ExtElement(random_ext(8, rng).P, np.zeros((8, 8), complex))
        W = p.lap.apply(x.P)
        expect = np.max(np.abs(np.linalg.eigvalsh(1j * W)))
        assert vorticity_supnorm(x, p.spin, p.lap) == pytest.approx(
            expect, abs=1e-10)

    @pytest.mark.parametrize("n", [4, 9, 16])
    def test_steady_closed_form(self, n):
        p = params_cached(n)
        x = steady_state(p)
        s = p.spin.s
        expect = p.spin.hbar * np.sqrt(s * (s + 1))
        assert vorticity_supnorm(x, p.spin, p.lap) == pytest.approx(
            expect, abs=1e-10)

    def test_quadratic_matrix_is_psd(self, rng):
        # reconstruct M directly and check positive semidefiniteness
        p = params_cached(7)
        x = random_ext(7, rng)
        W = p.lap.apply(x.P) + x.B
        M = -(W @ W)
        for S in (p.spin.S1, p.spin.S2, p.spin.S3):
            C = S @ x.B - x.B @ S
            M -= C @ C
        lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
        assert lam[0] >= -1e-10 * max(lam[-1], 1.0)


class TestCollect:
    def test_zero_state(self):
        p = params_cached(4)
        rec = collect(zero_state(4), 3.5, p)
        assert rec.t == 3.5
        for f in dataclasses.fields(rec):
            if f.name != "t":
                assert getattr(rec, f.name) == 0.0

    def test_deterministic(self, rng):
        p = params_cached(6)
        x = random_ext(6, rng)
        a = collect(x, 1.0, p)
        b = collect(x, 1.0, p)
        assert a == b

    def test_eig_bounds_ordered(self, rng):
        p = params_cached(6)
        rec = collect(random_ext(6, rng), 0.0, p)
        assert rec.b_eig_min <= rec.b_eig_max

    def test_steady_state_record_constant_along_flow(self):
        p = params_cached(8)
        x = steady_state(p)
        rec0 = collect(x, 0.0, p)
        final = run_simulation(x, p, IntegratorConfig(dt=0.1), 20.0)
        rec1 = collect(final.x, 0.0, p)
        for f in dataclasses.fields(rec0):
            assert getattr(rec1, f.name) == pytest.approx(
                getattr(rec0, f.name), abs=1e-10)

    def test_validate_rejects_nonfinite(self):
        rec = DiagnosticsRecord(0, np.nan, 0, 0, 0, 0, 0, 0, 0, 0)
        with pytest.raises(ValueError):
            rec.validate()
        rec = DiagnosticsRecord(0, -1.0, 0, 0, 0, 0, 0, 0, 0, 0)
        with pytest.raises(ValueError):
            rec.validate()


def test_stepper_contract_discrimination(rng):
    # structure-preserving: c2..c4 constant to 1e-8 relative; rk4 drifts
    from axizeit.diagnostics import casimir_C
    n = 8
    p = params_cached(n)
    x = random_ext(n, rng)
    e = energy(x, p.lap)
    x = ExtElement(x.P / np.sqrt(e), x.B / np.sqrt(e))
    c0 = {k: casimir_C(x, k) for k in (2, 3, 4)}
    sp = run_simulation(x, p, IntegratorConfig(dt=0.05), 10.0).x
    rk = run_simulation(
        x, p, IntegratorConfig(dt=0.05, method="rk4_reference"), 10.0).x
    for k, v in c0.items():
        assert abs(casimir_C(sp, k) - v) <= 1e-8 * max(abs(v), 1.0)
    drift = max(abs(casimir_C(rk, k) - v) for k, v in c0.items())
    assert drift > 1e-12
