import itertools

import numpy as np
import pytest

from nnspectra.limitlaw import limit_logpot_toeplitz, symbol_at, symbol_roots
from nnspectra.linalg import eigenvalues, logdet_complex
from nnspectra.models import (
    Constant,
    DiagonalLaw,
    RegularizationParams,
    TwistedSymbol,
    build_regularized,
    sample_diagonal,
)
from nnspectra.rng import RandomStream
from nnspectra.transfer import (
    bad_z_check,
    lyapunov_spectrum,
    scalar_transfer_sequence,
    thouless_logpot,
    transfer_eigenvector,
    transfer_matrix,
)

from conftest import match_multisets


class TestTransferMatrix:
    def test_scalar_case(self):
        tm = transfer_matrix([0.3 + 0.1j, 2.0], 1.5)
        assert tm.dim == 1
        assert tm.matrix[0, 0] == (1.5 - (0.3 + 0.1j)) / 2.0

    def test_structure(self):
        t = [1.0, 2.0, 3.0, 4.0]
        z = 0.7j
        tm = transfer_matrix(t, z)
        assert tm.dim == 3
        want_top = np.array([-3.0 / 4.0, -2.0 / 4.0, (z - 1.0) / 4.0])
        assert np.allclose(tm.matrix[0], want_top)
        assert np.array_equal(tm.matrix[1:, :-1], np.eye(2))
        assert np.max(np.abs(tm.matrix[1:, -1])) == 0

    def test_eigenvector_identity(self, rng):
        # 200 random draws with band degree <= 5
        stream = RandomStream(31)
        done = 0
        while done < 200:
            u = stream.uniforms(3)
            d = 1 + int(u[0] * 5)
            t = stream.complex_gaussians(d + 1)
            if abs(t[d]) < 0.05 * np.max(np.abs(t)):
                continue
            z = 2.0 * np.sqrt(u[2]) * np.exp(2j * np.pi * u[1])
            tm = transfer_matrix(t, z)
            shifted = np.asarray(tm.coeffs).copy()
            shifted[0] -= z
            roots = symbol_roots(symbol_at(TwistedSymbol.constant(tm.coeffs), z, 0.0))
            tnorm = np.sqrt(np.sum(np.abs(tm.matrix) ** 2))
            for r in roots:
                v = transfer_eigenvector(r, tm.dim)
                resid = np.max(np.abs(tm.matrix @ v - r * v))
                assert resid <= 1e-10 * (1.0 + tnorm)
            done += 1

    def test_eigenvalues_match_symbol_roots(self, rng):
        t = [0.5, -1.0 + 0.3j, 0.0, 2.0]
        z = 1.2 - 0.4j
        tm = transfer_matrix(t, z)
        ev = eigenvalues(tm.matrix).values
        roots = symbol_roots(symbol_at(TwistedSymbol.constant(t), z, 0.0))
        assert match_multisets(ev, roots) < 1e-8

    def test_det_identity(self, rng):
        # |det T| = |z - t0| / |t_dh|
        for _ in range(20):
            t = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            if abs(t[3]) < 0.1:
                continue
            z = complex(*rng.standard_normal(2))
            tm = transfer_matrix(t, z)
            logabs, _ = logdet_complex(tm.matrix)
            want = np.log(abs(z - t[0])) - np.log(abs(t[3]))
            assert abs(logabs - want) < 1e-10

    def test_zero_leading_rejected(self):
        with pytest.raises(ValueError):
            transfer_matrix([1.0, 0.0], 0.5)


class TestLyapunov:
    def test_constant_matrix(self):
        t = np.array([[2.0, 1.0], [0.0, 0.5]], dtype=complex)
        spec = lyapunov_spectrum(itertools.repeat(t), 2000)
        assert abs(spec.exponents[0] - np.log(2)) < 1e-3
        assert abs(spec.exponents[1] + np.log(2)) < 1e-3

    def test_identity(self):
        spec = lyapunov_spectrum(itertools.repeat(np.eye(3, dtype=complex)), 50)
        assert np.max(np.abs(spec.exponents)) == 0.0

    def test_scalar_telescoping_is_exact(self):
        d = sample_diagonal(DiagonalLaw.uniform(-2, 2), 4000, seed=3)
        z = 3.0 + 0.2j
        spec = lyapunov_spectrum(scalar_transfer_sequence(d, z), 4000)
        want = float(np.mean(np.log(np.abs(z - d))))
        assert abs(spec.exponents[0] - want) < 1e-12

    def test_singular_factor_aborts_with_index(self):
        mats = [np.eye(1, dtype=complex)] * 5 + [np.zeros((1, 1), dtype=complex)]
        with pytest.raises(ValueError, match="index 5"):
            lyapunov_spectrum(iter(mats), 6)

    def test_reversal_stationarity(self):
        # mild i.i.d. coefficient randomness: spectrum invariant (to 2e-3)
        # under reversing the sequence
        stream = RandomStream(8)
        t0 = 0.1 * stream.uniforms(10000)
        z = 3.0
        mats = [transfer_matrix([c, 1.0, 1.0], z).matrix for c in t0]
        fwd = lyapunov_spectrum(iter(mats), len(mats))
        bwd = lyapunov_spectrum(iter(mats[::-1]), len(mats))
        assert np.max(np.abs(fwd.exponents - bwd.exponents)) < 2e-3

    def test_qr_renormalization_is_exact_product_qr(self, rng):
        # the accumulated log|R_jj| equal the R-factor diagonal of the QR
        # of the explicit product (an exact algebraic identity)
        dim, length = 3, 6
        mats = [
            rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            for _ in range(length)
        ]
        spec = lyapunov_spectrum(iter(mats), length)
        prod = np.eye(dim, dtype=complex)
        for t in mats:
            prod = t @ prod
        rdiag = np.sort(np.abs(np.diag(np.linalg.qr(prod)[1])))[::-1]
        want = np.log(rdiag) / length
        assert np.max(np.abs(np.sort(spec.exponents)[::-1] - want)) < 1e-12

    def test_jackknife_errors_reported(self):
        d = sample_diagonal(DiagonalLaw.uniform(-2, 2), 2000, seed=4)
        spec = lyapunov_spectrum(scalar_transfer_sequence(d, 3.0), 2000)
        assert spec.std_errors.shape == (1,)
        assert 0 < spec.std_errors[0] < 0.1


class TestThouless:
    def test_jensen(self):
        assert abs(thouless_logpot([0, 1], 2.0, length=10000) - np.log(2)) < 1e-3

    def test_matches_closed_form(self):
        a = [0, 1, 1]
        z = 3.0
        got = thouless_logpot(a, z, length=10000)
        assert abs(got - limit_logpot_toeplitz(a, z)) < 1e-3

    def test_degenerate_degree_falls_back(self):
        assert thouless_logpot([5.0], 1.0) == pytest.approx(np.log(4.0), abs=1e-14)

    def test_property_vs_closed_form(self, rng):
        for _ in range(5):
            a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            if abs(a[2]) < 0.3:
                continue
            z = 4.0 + 0.5j
            got = thouless_logpot(a, z, length=10000)
            want = limit_logpot_toeplitz(a, z)
            assert abs(got - want) < 1e-3


class TestBadZ:
    def _model(self, coeffs, n=200):
        sym = TwistedSymbol.constant(coeffs)
        return build_regularized(sym, n, RegularizationParams(0.02, 0.05, 0.09))

    def test_root_on_circle_flagged(self):
        model = self._model([0, 1])
        rep = bad_z_check(model, np.exp(0.4j), delta1=0.02)
        assert rep.flagged and "root-near-circle" in rep.reasons

    def test_double_root_flagged(self):
        # u^2 - 2u + (1 - z) has a double root exactly at z = 0
        model = self._model([1.0, -2.0, 1.0])
        rep = bad_z_check(model, 0.0, delta1=0.02)
        assert rep.flagged and "discriminant-small" in rep.reasons

    def test_clean_point(self):
        model = self._model([0, 1])
        rep = bad_z_check(model, 5.0, delta1=0.02)
        assert not rep.flagged and rep.reasons == frozenset()
        assert rep.diagnostics[0]["circle_margin"] > 0
