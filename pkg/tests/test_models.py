import numpy as np
import pytest

from nnspectra import linalg
from nnspectra.models import (
    Affine,
    Constant,
    DiagonalLaw,
    NoiseSpec,
    Polynomial,
    RegularizationParams,
    Tabulated,
    TwistedSymbol,
    as_generator,
    block_index,
    build_banded_toeplitz,
    build_bidiagonal,
    build_regularized,
    build_twisted,
    dump_matrix_csv,
    generator_from_spec,
    perturb,
    random_unitary,
    sample_diagonal,
    sample_ginibre,
)


class TestBuilders:
    def test_toeplitz_jordan(self):
        m = build_banded_toeplitz(TwistedSymbol.constant([0, 1]), 9)
        assert np.array_equal(m, np.eye(9, k=1, dtype=complex))

    def test_toeplitz_two_band(self):
        m = build_banded_toeplitz(TwistedSymbol.constant([0, 1, 1]), 4)
        want = np.eye(4, k=1) + np.eye(4, k=2)
        assert np.array_equal(m, want.astype(complex))

    def test_toeplitz_scalar(self):
        m = build_banded_toeplitz(TwistedSymbol.constant([2.5j]), 3)
        assert np.array_equal(m, 2.5j * np.eye(3))

    def test_toeplitz_size_check(self):
        with pytest.raises(ValueError):
            build_banded_toeplitz(TwistedSymbol.constant([0, 1, 1]), 2)

    def test_twisted_wilkinson_diagonal(self):
        n = 40
        sym = TwistedSymbol((Affine(-1.0, 2.0), Constant(1.0)))
        m = build_twisted(sym, n)
        i = np.arange(1, n + 1)
        assert np.allclose(np.diag(m), -1 + 2 * i / n)
        assert np.allclose(np.diag(m, 1), 1.0)
        assert np.max(np.abs(np.tril(m, -1))) == 0

    def test_twisted_constant_equals_toeplitz_exactly(self):
        sym = TwistedSymbol.constant([0.3, 1.0 - 0.2j, 0.7j])
        assert np.array_equal(build_twisted(sym, 11), build_banded_toeplitz(sym, 11))

    def test_twisted_zero_generators(self):
        m = build_twisted(TwistedSymbol.constant([0, 0]), 5)
        assert np.max(np.abs(m)) == 0

    def test_bidiagonal(self):
        assert np.array_equal(
            build_bidiagonal(np.zeros(6)), np.eye(6, k=1, dtype=complex)
        )
        z = 0.4 - 0.1j
        m = build_bidiagonal(np.full(5, z))
        assert np.allclose(np.diag(m), z)
        assert np.allclose(np.diag(m, 1), 1.0)
        assert build_bidiagonal([3.0]).shape == (1, 1)


class TestRegularized:
    def test_threshold_kills_small_coefficients(self):
        sym = TwistedSymbol.constant([1e-3, 1e-3])
        params = RegularizationParams(0.1, 0.49, 0.45)
        rm = build_regularized(sym, 300, params)  # 300**-0.49 ~ 0.061 > 1e-3
        assert np.max(np.abs(rm.matrix)) == 0

    def test_constant_symbol_matches_toeplitz(self):
        sym = TwistedSymbol.constant([0, 1, 1])
        params = RegularizationParams(0.02, 0.05, 0.09)
        rm = build_regularized(sym, 64, params)
        assert np.array_equal(rm.matrix, build_banded_toeplitz(sym, 64))

    def test_blocks_constant_and_lengths(self):
        n = 256
        delta1 = 0.02
        sym = TwistedSymbol((Affine(-1.0, 2.0), Constant(1.0)))
        rm = build_regularized(sym, n, RegularizationParams(delta1, 0.05, 0.09))
        # direct scan oracle for the block labels, with the last two merged
        ks = np.floor(np.arange(1, n + 1) * n ** (delta1 - 1.0)).astype(int)
        labels = sorted(set(ks))
        starts = [int(np.argmax(ks == lab)) for lab in labels]
        if len(starts) >= 2:
            starts = starts[:-1]
        want = np.array(starts + [n])
        assert np.array_equal(rm.boundaries, want)
        diag = np.diag(rm.matrix)
        for k in range(rm.n_blocks):
            lo, hi = rm.boundaries[k], rm.boundaries[k + 1]
            assert np.all(diag[lo:hi] == diag[lo])
        lengths = np.diff(rm.boundaries)
        assert np.all(lengths >= n ** (1 - delta1) / 2)
        assert np.all(lengths <= 2 * n ** (1 - delta1))

    def test_distance_to_twisted(self):
        # affine generators are 1-Holder with constant |slope|
        n = 400
        d1, d2 = 0.04, 0.21
        sym = TwistedSymbol((Affine(-1.0, 2.0), Affine(0.5, 0.25)))
        rm = build_regularized(sym, n, RegularizationParams(d1, d2, 0.2))
        tw = build_twisted(sym, n)
        gap = np.max(np.abs(rm.matrix - tw))
        c = 4.0 * (2.0 + 1.0)
        assert gap <= c * (n ** (-d1) + n ** (-d2))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            RegularizationParams(0.6, 0.1, 0.1)
        with pytest.raises(ValueError):
            RegularizationParams(0.1, 0.1, 0.2)  # delta1 >= delta3/4
        p = RegularizationParams(0.001, 0.002, 0.005)
        p.check_against(gamma=2.0, d=2)
        with pytest.raises(ValueError):
            RegularizationParams(0.04, 0.02, 0.4).check_against(gamma=0.6, d=2)


class TestSampling:
    def test_profile_exact(self):
        law = DiagonalLaw.profile(Polynomial((0.0, 1.0)))  # f(x) = x
        d = sample_diagonal(law, 10, seed=0)
        assert np.array_equal(d.real, np.arange(1, 11) / 10)

    def test_uniform_mean(self):
        d = sample_diagonal(DiagonalLaw.uniform(-2, 2), 100000, seed=1)
        assert np.all(np.abs(d.imag) == 0)
        assert abs(d.real.mean()) < 3 * 4 / np.sqrt(12 * d.size)

    def test_discrete_law(self):
        law = DiagonalLaw.discrete([1.0, 1j], [0.25, 0.75])
        d = sample_diagonal(law, 40000, seed=2)
        frac = np.mean(d == 1j)
        assert abs(frac - 0.75) < 0.01

    def test_same_seed_identical(self):
        law = DiagonalLaw.uniform(-2, 2)
        assert np.array_equal(
            sample_diagonal(law, 100, seed=5), sample_diagonal(law, 100, seed=5)
        )

    def test_ginibre_moments(self):
        n = 500
        g = sample_ginibre(n, 3)
        assert abs(np.mean(np.abs(g) ** 2) - 1.0) < 3 * np.sqrt(2) / n

    def test_ginibre_operator_norm(self):
        # Monte-Carlo oracle: top singular value of G / sqrt(N) is near 2
        vals = []
        for seed in range(20):
            g = sample_ginibre(120, seed)
            vals.append(linalg.singular_values(g)[0] / np.sqrt(120))
        assert 1.8 <= np.mean(vals) <= 2.2

    def test_ginibre_bitwise_repeatable(self):
        assert np.array_equal(sample_ginibre(50, 9), sample_ginibre(50, 9))

    def test_law_validation(self):
        with pytest.raises(ValueError):
            DiagonalLaw.uniform(1, 1)
        with pytest.raises(ValueError):
            DiagonalLaw.discrete([1.0], [0.5])


class TestPerturb:
    def test_huge_gamma_vanishes(self):
        m = build_banded_toeplitz(TwistedSymbol.constant([0, 1]), 100)
        noisy = perturb(m, NoiseSpec(gamma=50.0, seed=1))
        assert np.max(np.abs(noisy - m)) < 1e-12

    def test_noise_frobenius_scale(self):
        n = 100
        noisy = perturb(np.zeros((n, n)), NoiseSpec(gamma=1.0, seed=4))
        fro = np.sqrt(np.sum(np.abs(noisy) ** 2))
        assert abs(fro - 1.0) < 0.2  # E ||G||_F^2 = N^2, scaled by N^-1

    def test_noise_is_seed_determined(self):
        n = 30
        spec = NoiseSpec(gamma=1.5, seed=8)
        m1 = np.zeros((n, n))
        m2 = np.diag(np.arange(n)).astype(complex)
        d1 = perturb(m1, spec) - m1
        d2 = perturb(m2, spec) - m2
        # identical up to the rounding of (M + noise) - M against |M|
        assert np.allclose(d1, d2, atol=1e-13, rtol=0)

    def test_gamma_bound(self):
        with pytest.raises(ValueError):
            NoiseSpec(gamma=0.4, seed=1)


class TestGenerators:
    def test_tabulated_interpolates_and_clamps(self):
        g = Tabulated((0.0, 1.0, 0.0))
        assert g(0.25) == 0.5
        assert g(-1.0) == 0.0 and g(2.0) == 0.0

    def test_spec_roundtrip(self):
        gens = [Constant(1 + 2j), Affine(0.5, -1j), Polynomial((1, 2, 3)),
                Tabulated((0.0, 1.0j))]
        for g in gens:
            g2 = generator_from_spec(g.spec())
            x = np.linspace(0, 1, 7)
            assert np.allclose(g(x), g2(x))

    def test_as_generator(self):
        assert isinstance(as_generator(2.0), Constant)
        with pytest.raises(TypeError):
            as_generator("nope")


def test_random_unitary():
    u = random_unitary(25, 1)
    assert np.max(np.abs(u.conj().T @ u - np.eye(25))) < 1e-12


def test_block_index_covers_all_labels():
    ks = block_index(500, 0.3)
    labs = np.unique(ks)
    assert labs[0] == 0
    assert np.array_equal(labs, np.arange(labs[-1] + 1))


def test_dump_matrix_csv(tmp_path):
    m = np.array([[1.0, 0.0], [0.0, -2.5e-17j]])
    path = tmp_path / "m.csv"
    dump_matrix_csv(m, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "i,j,re,im"
    assert len(lines) == 3  # zero entries suppressed
    i, j, re, im = lines[1].split(",")
    assert (i, j) == ("0", "0") and float(re) == 1.0
