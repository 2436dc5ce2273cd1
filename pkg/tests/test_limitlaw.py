import numpy as np
import pytest

from nnspectra.limitlaw import (
    SingularityProximityError,
    limit_logpot_iid,
    limit_logpot_quadrature,
    limit_logpot_toeplitz,
    limit_logpot_twisted,
    poly_roots,
    sample_limit_law,
    symbol_at,
    symbol_roots,
)
from nnspectra.models import Affine, Constant, DiagonalLaw, TwistedSymbol
from nnspectra.rng import RandomStream

from conftest import match_multisets


class TestRoots:
    def test_linear(self):
        s = symbol_at(TwistedSymbol.constant([0, 1]), 0.7 - 0.2j, 0.0)
        assert match_multisets(symbol_roots(s), [0.7 - 0.2j]) < 1e-14

    def test_quadratic_pm_one(self):
        # u^2 - 1: coefficients (-1, 0, 1)
        assert match_multisets(poly_roots([-1, 0, 1]), [1, -1]) < 1e-12

    def test_u2_plus_u(self):
        s = symbol_at(TwistedSymbol.constant([0, 1, 1]), 0.0, 0.0)
        assert match_multisets(symbol_roots(s), [0, -1]) < 1e-12

    def test_residuals_small(self, rng):
        for _ in range(50):
            c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            if abs(c[-1]) < 0.1:
                continue
            roots = poly_roots(c)
            vals = np.polyval(c[::-1], roots)
            scale = np.max(np.abs(c)) * np.maximum(np.abs(roots), 1.0) ** 4
            assert np.all(np.abs(vals) <= 1e-8 * scale)

    def test_degenerate_rejected(self):
        s = symbol_at(TwistedSymbol.constant([1.0]), 0.3, 0.0)
        with pytest.raises(ValueError):
            symbol_roots(s)


class TestToeplitzLogpot:
    def test_pure_shift_is_log_plus(self):
        for z in (2.0, 0.5, -3j, 0.2 + 0.1j):
            want = max(np.log(abs(z)), 0.0)
            assert abs(limit_logpot_toeplitz([0, 1], z) - want) < 1e-12

    def test_scalar_symbol(self):
        c, z = 1.5 - 0.5j, 0.25j
        assert abs(limit_logpot_toeplitz([c], z) - np.log(abs(c - z))) < 1e-14

    def test_matches_quadrature_off_curve(self):
        for z in (2.1, 3.0, -1.5 + 1.2j, 0.3 + 0.4j):
            a = limit_logpot_toeplitz([0, 1, 1], z)
            b = limit_logpot_quadrature([0, 1, 1], z, nodes=4096)
            assert abs(a - b) < 1e-8

    def test_on_curve_closed_form_finite_quadrature_refuses(self):
        # z = 2 sits exactly on the symbol curve of u + u^2 (P(1) = 2): the
        # root form stays finite (roots 1 and -2), the circle average hits a
        # log singularity at a node and must refuse
        val = limit_logpot_toeplitz([0, 1, 1], 2.0)
        assert abs(val - np.log(2.0)) < 1e-12
        with pytest.raises(SingularityProximityError) as exc:
            limit_logpot_quadrature([0, 1, 1], 2.0)
        assert exc.value.distance < 1e-12

    def test_all_zero_symbol(self):
        assert limit_logpot_toeplitz([0.0], 0.0) == -np.inf
        assert abs(limit_logpot_toeplitz([0.0, 0.0], 2.0) - np.log(2.0)) < 1e-14

    def test_large_z_asymptote(self):
        z = 1e6 * np.exp(0.3j)
        assert abs(limit_logpot_toeplitz([0, 1, 1], z) - np.log(abs(z))) < 1e-4

    def test_rotation_invariance(self, rng):
        for _ in range(20):
            a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            z = 3.0 + 1.0j
            omega = np.exp(1j * rng.uniform(0, 2 * np.pi))
            v1 = limit_logpot_toeplitz(a, z)
            v2 = limit_logpot_toeplitz(omega * a, omega * z)
            assert abs(v1 - v2) < 1e-10


class TestQuadrature:
    def test_jensen_outside(self):
        assert abs(limit_logpot_quadrature([0, 1], 2.0) - np.log(2)) < 1e-10

    def test_jensen_inside(self):
        assert abs(limit_logpot_quadrature([0, 1], 0.0)) < 1e-10

    def test_property_equivalence_random_symbols(self, rng):
        # Thouless/Jensen equivalence for random constant symbols; test
        # points kept 0.05 clear of the curve so 4096 nodes converge past
        # 1e-8 (they satisfy the >= 1e-3 clearance requirement a fortiori)
        theta = 2 * np.pi * np.arange(2048) / 2048
        u = np.exp(1j * theta)
        checked = 0
        while checked < 30:
            deg = int(rng.integers(1, 5))
            a = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            if abs(a[-1]) < 0.2:
                continue
            z = 4.0 * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
            curve = np.polyval(a[::-1], u)
            if np.min(np.abs(curve - z)) < 0.05:
                continue
            v1 = limit_logpot_toeplitz(a, z)
            v2 = limit_logpot_quadrature(a, z, nodes=4096)
            assert abs(v1 - v2) <= 1e-8
            checked += 1


class TestTwisted:
    def test_constant_reduction_exact(self):
        sym = TwistedSymbol.constant([0.2, 1.0, 0.5j])
        for z in (2.5, -3.0 + 1j):
            assert limit_logpot_twisted(sym, z) == pytest.approx(
                limit_logpot_toeplitz([0.2, 1.0, 0.5j], z), abs=1e-12
            )

    def test_wilkinson_vs_1d_quadrature(self):
        # d = 1 with f1 = 1: the single root is z - f0(x), so the value is
        # the x-integral of log+|z - f0(x)|; oracle by dense midpoint rule
        sym = TwistedSymbol((Affine(-1.0, 2.0), Constant(1.0)))
        z = 2.0
        xs = (np.arange(200001) + 0.5) / 200001
        integrand = np.log(np.abs(z - (-1 + 2 * xs)))
        oracle = float(np.mean(np.maximum(integrand, 0.0)))
        got = limit_logpot_twisted(sym, z, x_nodes=2048)
        assert abs(got - oracle) < 5e-5

    def test_diagonal_only_branch(self):
        # f_l = 0 for l >= 1: integral of log|f0(x) - z|
        sym = TwistedSymbol((Affine(0.0, 1.0), Constant(0.0)))
        z = 3.0
        xs = (np.arange(2048) + 0.5) / 2048
        oracle = float(np.mean(np.log(np.abs(xs - z))))
        assert abs(limit_logpot_twisted(sym, z, x_nodes=2048) - oracle) < 1e-12

    def test_refused_panels_warn(self):
        sym = TwistedSymbol((Constant(0.5), Constant(0.0)))
        with pytest.warns(RuntimeWarning):
            limit_logpot_twisted(sym, 0.5, x_nodes=64)

    def test_sampler_logpot_matches_twisted(self):
        # empirical log potential of limit-law samples at exterior points
        sym = TwistedSymbol((Affine(-1.0, 2.0), Constant(1.0)))
        pts = sample_limit_law(sym, 10000, seed=21)
        for z in (4.0, -4.0j):
            emp = float(np.mean(np.log(np.abs(z - pts))))
            assert abs(emp - limit_logpot_twisted(sym, z)) < 0.05


class TestIid:
    def test_point_mass(self):
        law = DiagonalLaw.discrete([1.0], [1.0])
        assert limit_logpot_iid(law, 1.0 + np.e) == pytest.approx(1.0, abs=1e-12)
        assert limit_logpot_iid(law, 1.0 + np.exp(-1)) == 0.0

    def test_atom_clamps_to_zero(self):
        law = DiagonalLaw.discrete([1.0, 2.0], [0.5, 0.5])
        assert limit_logpot_iid(law, 1.0) == 0.0

    def test_uniform_vs_antiderivative(self):
        law = DiagonalLaw.uniform(-2.0, 2.0)
        f = lambda t: (t - 3) * np.log(abs(3 - t)) - t
        want = max((f(2.0) - f(-2.0)) / 4.0, 0.0)
        assert limit_logpot_iid(law, 3.0) == pytest.approx(want, abs=1e-9)

    def test_uniform_complex_z(self):
        # oracle: closed antiderivative of log|z - t| for complex z
        law = DiagonalLaw.uniform(-2.0, 2.0)
        z = 0.3 + 0.7j
        u, v = z.real, z.imag

        def g(s):
            return 0.5 * s * np.log(s * s + v * v) - s + v * np.arctan(s / v)

        want = max((g(2.0 - u) - g(-2.0 - u)) / 4.0, 0.0)
        assert limit_logpot_iid(law, z) == pytest.approx(want, abs=1e-9)

    def test_real_z_inside_support(self):
        law = DiagonalLaw.uniform(-2.0, 2.0)
        f = lambda t, z: (t - z) * np.log(abs(z - t)) - t
        z = 0.5
        want = max((f(2.0, z) - f(-2.0, z)) / 4.0, 0.0)
        assert limit_logpot_iid(law, z) == pytest.approx(want, abs=1e-8)

    def test_profile_rejected(self):
        law = DiagonalLaw.profile(Affine(0, 1))
        with pytest.raises(ValueError):
            limit_logpot_iid(law, 1.0)


class TestSampler:
    def test_unit_circle(self):
        s = sample_limit_law(TwistedSymbol.constant([0, 1]), 500, seed=1)
        assert np.max(np.abs(np.abs(s) - 1.0)) < 1e-12

    def test_constant(self):
        s = sample_limit_law(TwistedSymbol.constant([2.0 - 1j]), 100, seed=1)
        assert np.all(s == 2.0 - 1j)

    def test_mean_vanishes(self):
        count = 40000
        s = sample_limit_law(TwistedSymbol.constant([0, 1, 1]), count, seed=5)
        assert abs(s.mean()) < 3 * np.sqrt(2) / np.sqrt(count)

    def test_count_validated(self):
        with pytest.raises(ValueError):
            sample_limit_law(TwistedSymbol.constant([0, 1]), 0, seed=1)
