import numpy as np
import pytest

from nnspectra.models import (
    Affine,
    Constant,
    NoiseSpec,
    TwistedSymbol,
    build_banded_toeplitz,
    build_twisted,
    perturb,
)
from nnspectra.rng import RandomStream
from nnspectra.spectra import (
    CompareReport,
    GridSpec,
    compare_measures,
    empirical_logpot,
    esd,
    kolmogorov_distance,
    pseudospectrum_grid,
    wasserstein1,
    write_compare_csv,
    write_esd_csv,
    write_grid_csv,
)

from conftest import random_complex


class TestEsd:
    def test_diagonal(self):
        s = esd(np.diag(np.arange(1.0, 6.0)))
        assert np.allclose(np.sort(s.points.real), [1, 2, 3, 4, 5])
        assert s.n == 5

    def test_nilpotent_cluster(self):
        j = np.eye(100, k=1, dtype=complex)
        s = esd(j)
        assert np.max(np.abs(s.points)) < 1e-6

    def test_noisy_jordan_concentrates_on_circle(self):
        n = 500
        j = build_banded_toeplitz(TwistedSymbol.constant([0, 1]), n)
        noisy = perturb(j, NoiseSpec(gamma=1.0, seed=77))
        s = esd(noisy, gamma=1.0, seed=77, model="jordan-noise")
        radii = np.abs(s.points)
        frac = np.mean((radii >= 0.9) & (radii <= 1.1))
        assert frac >= 0.95

    def test_metadata(self):
        s = esd(np.eye(3), gamma=1.5, seed=4, model="idtest")
        assert (s.gamma, s.seed, s.model) == (1.5, 4, "idtest")


class TestEmpiricalLogpot:
    def test_upper_triangular(self, rng):
        n = 20
        m = np.triu(random_complex(rng, n, n))
        z = 2.5 - 0.5j
        want = float(np.mean(np.log(np.abs(np.diag(m) - z))))
        assert abs(empirical_logpot(m, z) - want) < 1e-10

    def test_zero_matrix(self):
        assert abs(empirical_logpot(np.zeros((5, 5)), np.e) - 1.0) < 1e-12

    def test_exact_eigenvalue_gives_minus_inf(self):
        m = np.diag([2.0, 3.0]).astype(complex)
        assert empirical_logpot(m, 2.0) == -np.inf

    def test_matches_eigenvalue_sum(self, rng):
        m = random_complex(rng, 40, 40)
        s = esd(m)
        for z in (8.0, -7.0 + 3.0j):
            want = float(np.mean(np.log(np.abs(z - s.points))))
            assert abs(empirical_logpot(m, z) - want) < 1e-6

    def test_translation_consistency(self, rng):
        m = random_complex(rng, 15, 15)
        c, z = 0.7 - 0.2j, 1.1 + 0.4j
        v1 = empirical_logpot(m + c * np.eye(15), z + c)
        v2 = empirical_logpot(m, z)
        assert abs(v1 - v2) < 1e-10


class TestPseudospectrum:
    def test_zero_matrix_field_is_modulus(self):
        gf = pseudospectrum_grid(np.zeros((4, 4)), GridSpec(-1, 1, 7, -1, 1, 5))
        want = np.abs(gf.xs[None, :] + 1j * gf.ys[:, None])
        assert np.max(np.abs(gf.values - want)) < 1e-12

    def test_jordan_at_origin(self):
        j = np.eye(30, k=1, dtype=complex)
        gf = pseudospectrum_grid(j, GridSpec(-0.1, 0.1, 3, -0.1, 0.1, 3))
        assert gf.values[1, 1] == 0.0

    def test_wilkinson_levels_nest(self):
        # 101x101 grid on [-1.5, 1.5]^2; the 100^-k sublevel sets shrink
        # toward the diagonal range and stay nested
        n = 100
        sym = TwistedSymbol((Affine(-1.0, 2.0), Constant(1.0)))
        m = build_twisted(sym, n)
        gf = pseudospectrum_grid(m, GridSpec(-1.5, 1.5, 101, -1.5, 1.5, 101))
        assert gf.failures == 0
        counts = []
        for k in range(1, 7):
            level = 100.0 ** (-k)
            counts.append(int(np.sum(gf.values <= level)))
        assert all(a >= b for a, b in zip(counts, counts[1:]))
        assert counts[0] < 101 * 101  # coarsest level is a proper subset
        assert counts[5] > 0          # deep levels persist (non-normality)

    def test_lipschitz_in_z(self, rng):
        m = random_complex(rng, 25, 25)
        gf = pseudospectrum_grid(m, GridSpec(-0.5, 0.5, 6, -0.5, 0.5, 6))
        dx = gf.xs[1] - gf.xs[0]
        dy = gf.ys[1] - gf.ys[0]
        assert np.max(np.abs(np.diff(gf.values, axis=1))) <= dx + 1e-12
        assert np.max(np.abs(np.diff(gf.values, axis=0))) <= dy + 1e-12

    def test_mode_forwarding(self, rng):
        m = random_complex(rng, 10, 10)
        g1 = pseudospectrum_grid(m, GridSpec(0, 1, 2, 0, 1, 2), mode="dense")
        g2 = pseudospectrum_grid(m, GridSpec(0, 1, 2, 0, 1, 2),
                                 mode="inverse_iteration")
        assert np.max(np.abs(g1.values - g2.values)) < 1e-6 * np.max(g1.values)


class TestDistances:
    def test_wasserstein_point_masses(self):
        assert wasserstein1([0.0] * 5, [1.0] * 5) == 1.0

    def test_wasserstein_known_value(self):
        # U[0,1] quantiles vs themselves shifted by c: W1 = c
        q = (np.arange(1000) + 0.5) / 1000
        assert abs(wasserstein1(q, q + 0.25) - 0.25) < 1e-12

    def test_kolmogorov(self):
        x = [0.0, 1.0]
        y = [0.0, 0.0]
        assert kolmogorov_distance(x, y) == 0.5


class TestCompare:
    def test_identical_samples(self, rng):
        pts = random_complex(rng, 200)
        rep = compare_measures(pts, pts.copy(), test_z=[10.0, 10j])
        assert rep.logpot_rmse == 0.0
        assert rep.radial_wasserstein == 0.0
        assert rep.angular_kolmogorov == 0.0
        assert rep.support_coverage == 1.0

    def test_point_masses(self):
        rep = compare_measures([0j] * 10, [1.0 + 0j] * 10, test_z=[5.0])
        assert rep.radial_wasserstein == 1.0
        assert rep.support_coverage == 0.0

    def test_circle_sample_vs_quantiles(self):
        count = 10000
        u = np.exp(2j * np.pi * RandomStream(55).uniforms(count))
        exact = np.exp(2j * np.pi * (np.arange(count) + 0.5) / count)
        rep = compare_measures(u, exact, test_z=[3.0, -3.0])
        assert rep.radial_wasserstein <= 0.02
        assert rep.angular_kolmogorov <= 0.05
        assert rep.logpot_rmse <= 0.02

    def test_symmetry(self, rng):
        a = random_complex(rng, 300)
        b = random_complex(rng, 200) * 0.5
        r1 = compare_measures(a, b, test_z=[9.0])
        r2 = compare_measures(b, a, test_z=[9.0])
        assert abs(r1.radial_wasserstein - r2.radial_wasserstein) < 1e-12
        assert abs(r1.angular_kolmogorov - r2.angular_kolmogorov) < 1e-12

    def test_close_test_point_excluded(self, rng):
        a = random_complex(rng, 50)
        rep = compare_measures(a, a, test_z=[a[0] + 0.01, 40.0])
        assert rep.excluded_test_points == [complex(a[0] + 0.01)]


def test_csv_writers(tmp_path):
    s = esd(np.diag([1.0, 2.0]).astype(complex))
    write_esd_csv(s, tmp_path / "esd.csv")
    assert (tmp_path / "esd.csv").read_text().splitlines()[0] == "re,im"

    gf = pseudospectrum_grid(np.zeros((3, 3)), GridSpec(0, 1, 2, 0, 1, 2))
    write_grid_csv(gf, tmp_path / "grid.csv")
    lines = (tmp_path / "grid.csv").read_text().splitlines()
    assert lines[0] == "x,y,sigma_min"
    assert len(lines) == 5

    rep = CompareReport(0.1, 0.2, 0.3, 0.4, 0.5, [1j])
    write_compare_csv(rep, tmp_path / "cmp.csv")
    assert "logpot_rmse" in (tmp_path / "cmp.csv").read_text()
