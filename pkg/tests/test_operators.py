import numpy as np
import pytest

from nlslab.bumps import phi_bump
from nlslab.errors import NonZeroMeanError, ValidationError
from nlslab.grids import ComplexField, GridSpec, forward_transform
from nlslab.operators import (
    dilation_D,
    dt_lo_multiplier,
    factorized_free_flow,
    fractional_derivative,
    free_propagate_field,
    lp_multiplier,
    lp_project,
    modulation_M,
    spectral_derivative,
    time_cutoff_multiplier,
    time_cutoff_project,
)

from conftest import gaussian_field, random_schwartz_field


def mode(grid: GridSpec, k: int) -> ComplexField:
    return ComplexField(grid, np.exp(1j * grid.xi[grid.num_points // 2 + k] * grid.x))


class TestBump:
    def test_plateau_and_support(self):
        x = np.linspace(-2, 2, 2001)
        v = phi_bump(x)
        assert np.all(v[np.abs(x) <= 1.0] == 1.0)
        assert np.all(v[np.abs(x) >= 10 / 9] == 0.0)
        assert np.all((v >= 0) & (v <= 1))
        assert np.allclose(v, v[::-1])  # even


class TestLittlewoodPaley:
    def test_partition_exact(self, grid_small):
        rng = np.random.default_rng(0)
        u = random_schwartz_field(grid_small, rng)
        lo = lp_project(u, "le", 4.0)
        hi = lp_project(u, "gt", 4.0)
        err = np.max(np.abs(lo.samples + hi.samples - u.samples))
        assert err <= 1e-14 * np.max(np.abs(u.samples))

    def test_low_mode_unchanged(self, grid_small):
        u = mode(grid_small, 30)  # |xi| < N for N chosen below
        n_band = abs(grid_small.xi[grid_small.num_points // 2 + 30]) * 1.01
        out = lp_project(u, "le", n_band)
        assert np.max(np.abs(out.samples - u.samples)) <= 1e-12

    def test_high_mode_killed(self, grid_small):
        k = 200
        xi_k = grid_small.xi[grid_small.num_points // 2 + k]
        n_band = xi_k / (10 / 9) * 0.99
        out = lp_project(mode(grid_small, k), "le", n_band)
        assert np.max(np.abs(out.samples)) <= 1e-12  # FFT roundoff of the unit mode

    def test_band_multiplier_sums_to_le(self, grid_small):
        # P_N = P_{<=N} - P_{<=N/2} by construction
        m_band = lp_multiplier(grid_small, "band", 8.0)
        m_le8 = lp_multiplier(grid_small, "le", 8.0)
        m_le4 = lp_multiplier(grid_small, "le", 4.0)
        assert np.allclose(m_band, m_le8 - m_le4, atol=1e-15)


class TestTimeCutoffs:
    def test_lo_plus_hi_is_identity(self, grid_small):
        rng = np.random.default_rng(3)
        u = random_schwartz_field(grid_small, rng)
        s = 7.3
        lo = time_cutoff_project(u, s, "lo")
        hi = time_cutoff_project(u, s, "hi")
        assert np.max(np.abs(lo.samples + hi.samples - u.samples)) <= 1e-14 * u.linf()

    def test_lo_at_s1_matches_unit_bump(self, grid_small):
        m = time_cutoff_multiplier(grid_small, 1.0, "lo")
        assert np.allclose(m, phi_bump(grid_small.xi))

    def test_med_band_support(self):
        g = GridSpec(2048, 400.0)  # dxi small enough to land inside the band
        s = 4.0
        scale = s**-0.5
        m = time_cutoff_multiplier(g, s, "med")
        xi = g.xi
        # nonzero at |xi| = s^{-1/2}: nearest grid point carries weight
        near = np.argmin(np.abs(xi - scale))
        assert m[near] > 0.1
        far = np.argmin(np.abs(xi - 10 * scale))
        assert m[far] == 0.0
        on = m > 1e-12
        assert np.all(np.abs(xi[on]) >= 0.9 * scale - g.dxi)
        assert np.all(np.abs(xi[on]) <= (10 / 9) * scale + g.dxi)

    def test_dt_lo_matches_finite_difference(self, grid_small):
        s, h = 9.0, 1e-5
        fd = (time_cutoff_multiplier(grid_small, s + h, "lo")
              - time_cutoff_multiplier(grid_small, s - h, "lo")) / (2 * h)
        assert np.max(np.abs(fd - dt_lo_multiplier(grid_small, s))) <= 1e-7

    def test_requires_s_at_least_one(self, grid_small):
        with pytest.raises(ValidationError):
            time_cutoff_multiplier(grid_small, 0.5, "lo")


class TestFractionalDerivative:
    def test_identity_at_zero_order(self, grid_small):
        rng = np.random.default_rng(4)
        u = random_schwartz_field(grid_small, rng)
        assert fractional_derivative(u, 0.0) is u

    def test_second_order_on_mode(self, grid_small):
        k = 11
        xi_k = grid_small.xi[grid_small.num_points // 2 + k]
        u = mode(grid_small, k)
        out = fractional_derivative(u, 2.0)
        assert np.max(np.abs(out.samples - xi_k**2 * u.samples)) <= 1e-9 * xi_k**2

    def test_inverse_pair_on_mean_zero(self, grid_small):
        rng = np.random.default_rng(5)
        u = random_schwartz_field(grid_small, rng)
        spec = forward_transform(u)
        vals = spec.samples.copy()
        vals[grid_small.num_points // 2] = 0.0  # remove the mean
        from nlslab.grids import inverse_transform

        u0 = inverse_transform(spec.with_samples(vals))
        back = fractional_derivative(fractional_derivative(u0, -1.0), 1.0)
        assert np.max(np.abs(back.samples - u0.samples)) <= 1e-10 * np.max(np.abs(u0.samples))

    def test_rejects_nonzero_mean_for_negative_order(self, grid_small):
        u = gaussian_field(grid_small)
        with pytest.raises(NonZeroMeanError):
            fractional_derivative(u, -1.0)


class TestFreePropagate:
    def test_dt_zero_is_identity(self, grid_small):
        u = gaussian_field(grid_small)
        out = free_propagate_field(u, 0.0)
        assert np.array_equal(out.samples, u.samples)

    def test_gaussian_closed_form(self):
        g = GridSpec(4096, 200.0)
        u = gaussian_field(g)
        for tau in (1.0, 4.5, 10.0):
            out = free_propagate_field(u, tau)
            a = 1 + 1j * tau
            exact = a**-0.5 * np.exp(-g.x**2 / (2 * a))
            assert np.max(np.abs(out.samples - exact)) <= 1e-8

    def test_l2_preserved(self, grid_small):
        rng = np.random.default_rng(6)
        u = random_schwartz_field(grid_small, rng)
        out = free_propagate_field(u, 3.7)
        assert abs(out.l2() - u.l2()) <= 1e-13 * u.l2()


class TestModulationDilation:
    def test_modulation_preserves_modulus(self, grid_small):
        u = gaussian_field(grid_small)
        out = modulation_M(2.5, u)
        assert np.allclose(np.abs(out.samples), np.abs(u.samples))

    def test_modulation_pointwise_bound(self, grid_small):
        # |M(t) - 1| <= min(2, x^2 / t) at every node, all t >= 1
        for t in (1.0, 3.0, 50.0):
            m = np.exp(1j * grid_small.x**2 / (2 * t))
            assert np.all(np.abs(m - 1.0) <= np.minimum(2.0, grid_small.x**2 / t) + 1e-15)

    def test_dilation_unitary(self, grid_small):
        u = gaussian_field(grid_small, width=2.0)
        out = dilation_D(3.0, u)
        assert abs(out.l2() - u.l2()) <= 1e-8 * u.l2()

    def test_factorization_matches_free_flow(self):
        g = GridSpec(1024, 100.0)
        u = gaussian_field(g, width=1.3, wavenumber=0.4)
        for t in (1.0, 4.0, 10.0):
            direct = free_propagate_field(u, t)
            fact = factorized_free_flow(t, u)
            rel = np.max(np.abs(direct.samples - fact.samples)) / np.max(np.abs(direct.samples))
            assert rel <= 1e-6


class TestSpectralDerivative:
    def test_derivative_of_gaussian(self, grid_small):
        u = gaussian_field(grid_small)
        du = spectral_derivative(u)
        exact = -grid_small.x * np.exp(-grid_small.x**2 / 2)
        assert np.max(np.abs(du.samples - exact)) <= 1e-10
