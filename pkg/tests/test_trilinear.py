import warnings

import numpy as np
import pytest

from nlslab.errors import GridTooLargeError, LatticeTooCoarseWarning, UnsupportedSymbolError, ValidationError
from nlslab.grids import ComplexField, GridSpec, forward_transform
from nlslab.operators import lp_multiplier, lp_project
from nlslab.resonance import build_cutoffs
from nlslab.trilinear import (
    SeparableSymbol,
    SymbolGrid,
    bernstein_check,
    cm_seminorm_estimate,
    est0_check,
    tri_estimate_check,
    trilinear_apply_bruteforce,
    trilinear_apply_fast,
    _random_schwartz,
)

from conftest import gaussian_field


@pytest.fixture(scope="module")
def g64() -> GridSpec:
    return GridSpec(64, 8.0)


@pytest.fixture(scope="module")
def abc(g64):
    return (
        gaussian_field(g64, 1.0, 0.8, 0.3, 1.0),
        gaussian_field(g64, 0.7, 1.1, -0.5, -2.0),
        gaussian_field(g64, 1.3, 0.9, 0.1, 0.5),
    )


def ones(x):
    return np.ones_like(x)


def ones3(x1, x2, x3):
    return np.ones_like(x1)


class TestSymbolGrid:
    def test_from_function_keeps_origin(self):
        sg = SymbolGrid.from_function(lambda a, b, c: a + b + c, 2.0, 9)
        assert 0.0 in sg.axis

    def test_rejects_asymmetric_axis(self):
        ax = np.linspace(-1, 2, 7)
        with pytest.raises(ValidationError):
            SymbolGrid(ax, np.zeros((7, 7, 7)))

    def test_rejects_nonfinite(self):
        ax = np.linspace(-1, 1, 5)
        vals = np.zeros((5, 5, 5))
        vals[0, 0, 0] = np.inf
        with pytest.raises(ValidationError):
            SymbolGrid(ax, vals)

    def test_csv_export(self, tmp_path):
        sg = SymbolGrid.from_function(lambda a, b, c: a + 2 * b + 3 * c, 1.0, 5)
        p = tmp_path / "symbol.csv"
        sg.to_csv(p)
        rows = p.read_text().splitlines()
        assert rows[0] == "xi1,xi2,xi3,value"
        assert len(rows) == 5**3 + 1


class TestCmSeminorm:
    def test_constant_symbol(self):
        sg = SymbolGrid.from_function(lambda a, b, c: np.ones_like(a), 4.0, 33)
        assert cm_seminorm_estimate(sg) == 1.0

    def test_chi2_finite_and_refinement_stable(self):
        # 0-homogeneous cutoff: measure away from the origin (|xi| >= half the
        # extent) at first order, where the transition sheets are resolved
        fam = build_cutoffs(0.1)
        sg = SymbolGrid.from_function(fam.chi2, 4.0, 161)
        with warnings.catch_warnings():
            warnings.simplefilter("error", LatticeTooCoarseWarning)
            v = cm_seminorm_estimate(sg, alpha_max=1, min_radius=2.0)
        assert np.isfinite(v) and v > 0

    def test_inverse_radius_diverges(self):
        def inv(a, b, c):
            r = np.sqrt(a * a + b * b + c * c)
            out = np.zeros_like(r)
            np.divide(1.0, r, out=out, where=r > 0)
            return out

        coarse = SymbolGrid.from_function(inv, 4.0, 33)
        fine = SymbolGrid.from_function(inv, 4.0, 65)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LatticeTooCoarseWarning)
            v_coarse = cm_seminorm_estimate(coarse)
            v_fine = cm_seminorm_estimate(fine)
        assert v_fine >= 1.8 * v_coarse  # grows ~2x per refinement: not Coifman-Meyer
        with pytest.warns(LatticeTooCoarseWarning):
            cm_seminorm_estimate(fine)

    def test_rejects_high_alpha(self):
        sg = SymbolGrid.from_function(lambda a, b, c: np.ones_like(a), 1.0, 9)
        with pytest.raises(ValidationError):
            cm_seminorm_estimate(sg, alpha_max=4)


class TestBruteForce:
    def test_unit_symbol_is_product_rule(self, g64, abc):
        a, b, c = abc
        out = trilinear_apply_bruteforce(ones3, a, b, c)
        prod = 2 * np.pi * a.samples * b.samples * c.samples
        assert np.max(np.abs(out.samples - prod)) <= 1e-10 * np.max(np.abs(prod))

    def test_zero_symbol(self, g64, abc):
        a, b, c = abc
        out = trilinear_apply_bruteforce(lambda x1, x2, x3: np.zeros_like(x1), a, b, c)
        assert np.max(np.abs(out.samples)) == 0.0

    def test_third_slot_projection_symbol(self, g64, abc):
        # m = phi(xi3): equals 2 pi a b P(c) with the same bump multiplier
        a, b, c = abc
        from nlslab.bumps import phi_bump

        out = trilinear_apply_bruteforce(lambda x1, x2, x3: phi_bump(x3), a, b, c)
        spec = forward_transform(c)
        proj = spec.with_samples(phi_bump(g64.xi) * spec.samples)
        from nlslab.grids import inverse_transform

        expected = 2 * np.pi * a.samples * b.samples * inverse_transform(proj).samples
        assert np.max(np.abs(out.samples - expected)) <= 1e-8 * np.max(np.abs(expected))

    def test_grid_cap(self):
        g = GridSpec(256, 8.0)
        u = gaussian_field(g)
        with pytest.raises(GridTooLargeError):
            trilinear_apply_bruteforce(ones3, u, u, u)

    def test_rejects_mixed_grids(self, g64, abc):
        a, b, _ = abc
        other = gaussian_field(GridSpec(64, 10.0))
        with pytest.raises(ValidationError):
            trilinear_apply_bruteforce(ones3, a, b, other)


class TestFastPath:
    def test_unit_symbol_matches_brute(self, g64, abc):
        a, b, c = abc
        sep = SeparableSymbol(ones, ones, ones)
        fast = trilinear_apply_fast(sep, a, b, c)
        brute = trilinear_apply_bruteforce(ones3, a, b, c)
        assert np.max(np.abs(fast.samples - brute.samples)) <= 1e-12 * np.max(np.abs(brute.samples))

    def test_hi_band_inverse_factor(self, g64, abc):
        # m3 = |xi3|^{-1} restricted to the hi band
        a, b, c = abc
        hi = lp_multiplier(g64, "gt", 2.0)

        def m3(x):
            out = np.zeros_like(x)
            np.divide(1.0, np.abs(x), out=out, where=np.abs(x) > 0)
            return out * np.interp(x, g64.xi, hi)

        sep = SeparableSymbol(ones, ones, m3)
        fast = trilinear_apply_fast(sep, a, b, c)
        brute = trilinear_apply_bruteforce(lambda x1, x2, x3: ones(x1) * ones(x2) * m3(x3), a, b, c)
        assert np.max(np.abs(fast.samples - brute.samples)) <= 1e-10 * np.max(np.abs(brute.samples))

    def test_random_separable_factors(self, g64, abc):
        a, b, c = abc
        rng = np.random.default_rng(23)
        ws = rng.uniform(1.0, 6.0, 3)

        def mk(w):
            return lambda x: np.exp(-((x / w) ** 2)) * np.cos(x / (w + 1))

        sep = SeparableSymbol(mk(ws[0]), mk(ws[1]), mk(ws[2]))
        fast = trilinear_apply_fast(sep, a, b, c)
        brute = trilinear_apply_bruteforce(sep, a, b, c)
        assert np.max(np.abs(fast.samples - brute.samples)) <= 1e-10 * np.max(np.abs(brute.samples))

    def test_rejects_plain_callable(self, g64, abc):
        a, b, c = abc
        with pytest.raises(UnsupportedSymbolError):
            trilinear_apply_fast(ones, a, b, c)


class TestEstimates:
    def test_est0_single_mode_closed_form(self):
        # u a single mode at |k| = 2N: every est0 term computable in closed form
        g = GridSpec(128, 16.0)
        n_band = 4.0
        k = int(round(2 * n_band / g.dxi))
        xi_k = g.xi[g.num_points // 2 + k]
        u = ComplexField(g, np.exp(1j * xi_k * g.x))
        terms = est0_check(u, n_band)
        l2 = u.l2()  # sqrt(L) for a unimodular mode
        uhat_peak = np.sqrt(2 * np.pi) / g.dxi  # dxi-normalized spike height
        assert np.isclose(terms["hi_Hm1"], n_band**0.5 * l2 / abs(xi_k), rtol=1e-10)
        assert np.isclose(terms["hi_Hm2"], n_band**1.5 * l2 / xi_k**2, rtol=1e-10)
        assert terms["lo_L2"] <= 1e-10
        assert np.isclose(terms["uhat_inf"], uhat_peak, rtol=1e-10)

    def test_triest1_vanishes_for_lo_band_c(self):
        g = GridSpec(64, 8.0)
        a = gaussian_field(g, width=1.0)
        b = gaussian_field(g, width=1.5)
        c_lo = lp_project(gaussian_field(g, width=2.0), "le", 20.0)
        # c has no content above the band: the >N slot is empty
        hi = lp_project(c_lo, "gt", 20.0 * (10 / 9) * 1.01)
        assert forward_transform(hi).linf() <= 1e-13

    @pytest.mark.parametrize("which", ["est0", "TriEst1", "TriEst2", "TriEst3"])
    def test_constants_finite_and_stable(self, which):
        consts = np.array([tri_estimate_check(which, nb, trials=20)["constant"] for nb in (4.0, 8.0, 16.0)])
        assert np.all(np.isfinite(consts)) and np.all(consts > 0)
        mid = 0.5 * (consts.max() + consts.min())
        assert np.all(np.abs(consts - mid) <= 0.5 * mid)

    def test_rejects_unknown_estimate(self):
        with pytest.raises(ValidationError):
            tri_estimate_check("TriEst9", 4.0)


class TestBernstein:
    def test_ratio_bounded_and_stable(self):
        g = GridSpec(256, 20.0)
        rng = np.random.default_rng(1)
        maxima = []
        for n_band in (2.0, 4.0, 8.0, 16.0):
            rs = [
                bernstein_check(_random_schwartz(g, rng, width=2 * n_band, cap=35.0, coherent=True), n_band)
                for _ in range(25)
            ]
            maxima.append(max(rs))
        maxima = np.array(maxima)
        mid = 0.5 * (maxima.max() + maxima.min())
        assert np.all(np.abs(maxima - mid) <= 0.5 * mid)
