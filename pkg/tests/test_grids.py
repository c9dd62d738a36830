import numpy as np
import pytest

from nlslab.errors import ValidationError
from nlslab.grids import ComplexField, GridSpec, forward_transform, inverse_transform, tail_mass

from conftest import gaussian_field, random_schwartz_field


def naive_dft(grid: GridSpec, samples: np.ndarray) -> np.ndarray:
    """Direct-summation oracle for the continuum-normalized transform."""
    kernel = np.exp(-1j * np.outer(grid.xi, grid.x))
    return grid.dx / np.sqrt(2 * np.pi) * kernel @ samples


class TestGridSpec:
    def test_basic_relations(self):
        g = GridSpec(256, 64.0)
        assert g.dx * g.num_points == g.domain_length
        assert np.isclose(g.dxi, 2 * np.pi / g.domain_length)
        assert g.x[0] == -32.0
        # xi-grid symmetric about 0 except the Nyquist mode
        assert np.allclose(g.xi[1:] + g.xi[1:][::-1], 0.0)

    @pytest.mark.parametrize("n", [0, -4, 7, 31])
    def test_rejects_bad_point_counts(self, n):
        with pytest.raises(ValidationError):
            GridSpec(n, 10.0)

    def test_rejects_bad_length(self):
        with pytest.raises(ValidationError):
            GridSpec(64, -1.0)


class TestComplexField:
    def test_rejects_nonfinite(self, grid_small):
        bad = np.zeros(grid_small.num_points, dtype=complex)
        bad[3] = np.nan
        with pytest.raises(ValidationError):
            ComplexField(grid_small, bad)

    def test_rejects_wrong_length(self, grid_small):
        with pytest.raises(ValidationError):
            ComplexField(grid_small, np.zeros(10, dtype=complex))

    def test_samples_read_only(self, grid_small):
        f = gaussian_field(grid_small)
        with pytest.raises(ValueError):
            f.samples[0] = 1.0


class TestForwardTransform:
    def test_self_dual_gaussian(self):
        g = GridSpec(4096, 200.0)
        uh = forward_transform(gaussian_field(g))
        assert np.max(np.abs(uh.samples - np.exp(-g.xi**2 / 2))) <= 1e-10

    def test_pure_mode_spike(self, grid_small):
        g = grid_small
        k = 5
        u = ComplexField(g, np.exp(1j * g.xi[g.num_points // 2 + k] * g.x))
        uh = forward_transform(u)
        expected = np.zeros(g.num_points)
        expected[g.num_points // 2 + k] = np.sqrt(2 * np.pi) / g.dxi
        assert np.max(np.abs(uh.samples - expected)) <= 1e-9 * expected.max()

    def test_matches_direct_summation(self):
        g = GridSpec(128, 20.0)
        rng = np.random.default_rng(0)
        u = ComplexField(g, rng.standard_normal(128) + 1j * rng.standard_normal(128))
        uh = forward_transform(u)
        ref = naive_dft(g, u.samples)
        assert np.max(np.abs(uh.samples - ref)) <= 1e-12 * np.max(np.abs(ref))

    def test_plancherel(self, grid_small):
        rng = np.random.default_rng(1)
        u = ComplexField(grid_small, rng.standard_normal(1024) + 1j * rng.standard_normal(1024))
        assert abs(u.l2() - forward_transform(u).l2()) <= 1e-12 * u.l2()

    def test_rejects_spectral_side(self, grid_small):
        f = ComplexField(grid_small, np.zeros(1024, dtype=complex), "spectral")
        with pytest.raises(ValidationError):
            forward_transform(f)


class TestInverseTransform:
    def test_round_trip(self, grid_small):
        rng = np.random.default_rng(2)
        u = ComplexField(grid_small, rng.standard_normal(1024) + 1j * rng.standard_normal(1024))
        back = inverse_transform(forward_transform(u))
        assert np.max(np.abs(back.samples - u.samples)) <= 1e-12 * np.max(np.abs(u.samples))

    def test_self_dual_gaussian_inverse(self):
        g = GridSpec(4096, 200.0)
        spec = ComplexField(g, np.exp(-g.xi**2 / 2).astype(complex), "spectral")
        u = inverse_transform(spec)
        assert np.max(np.abs(u.samples - np.exp(-g.x**2 / 2))) <= 1e-10

    def test_zero_mode_spike_gives_constant(self, grid_small):
        g = grid_small
        h = 3.7
        spec = np.zeros(g.num_points, dtype=complex)
        spec[g.num_points // 2] = h
        u = inverse_transform(ComplexField(g, spec, "spectral"))
        expected = h * g.dxi / np.sqrt(2 * np.pi)
        assert np.max(np.abs(u.samples - expected)) <= 1e-13


class TestTailMass:
    def test_zero_for_centered_gaussian(self, grid_small):
        assert tail_mass(gaussian_field(grid_small)) < 1e-300

    def test_detects_boundary_mass(self, grid_small):
        g = grid_small
        u = gaussian_field(g, center=0.48 * g.domain_length, width=2.0)
        assert tail_mass(u) > 0.5
