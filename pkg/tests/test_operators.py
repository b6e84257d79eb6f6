import numpy as np
import pytest

from oscillab import (
    GridSpec,
    SampledField,
    apply_bilinear,
    apply_linear,
    fit_dyadic_slope,
    forward_ft,
    four_product_split,
    inverse_ft,
    lp_norm,
    make_atom,
    make_Sj,
    make_T,
    modulated_plateau,
)
from oscillab.operators import goal_sum
from oscillab.symbols import SeparableSymbol, SeparableTerm, SymbolSpec


def band_field(grid, lo, hi, seed=0):
    rng = np.random.default_rng(seed)
    r = grid.radius_xi()
    mask = (r >= lo) & (r <= hi)
    coef = np.where(mask, rng.normal(size=r.shape) + 1j * rng.normal(size=r.shape), 0.0)
    return inverse_ft(SampledField(grid, coef, "frequency"))


def ones_profile(r):
    return np.ones_like(np.asarray(r, dtype=float))


class TestApplyLinear:
    def test_Sj_kills_low_band(self, frame, grid_small):
        f = band_field(grid_small, 0.0, 1.0, seed=1)  # zeta vanishes there
        out = apply_linear(make_Sj(0.5, 4.0, frame), f)
        assert np.abs(out.samples).max() < 1e-13 * np.abs(f.samples).max()

    def test_T_is_L1_bounded_convolution(self, frame, grid_small):
        f = band_field(grid_small, 0.0, 1.5, seed=2)
        out = apply_linear(make_T(0.5, frame), f)
        assert lp_norm(out, 2.0) <= lp_norm(f, 2.0) * (1 + 1e-12)

    def test_aliasing_guarded(self, frame, grid_small):
        f = band_field(grid_small, 0.0, 1.0)
        with pytest.raises(Exception):
            apply_linear(make_Sj(0.5, 12.0, frame), f)


class TestApplyBilinear:
    def test_plain_product_without_oscillation(self, frame, grid_small):
        f = band_field(grid_small, 0.0, 20.0, seed=3)
        g = band_field(grid_small, 0.0, 20.0, seed=4)
        one = SeparableSymbol(terms=[SeparableTerm(1.0, ones_profile, ones_profile)])
        out = apply_bilinear(one, 0.5, f, g, oscillation=False)
        expect = f.samples * g.samples
        assert np.abs(out.samples - expect).max() < 1e-10 * np.abs(expect).max()

    def test_oscillation_factorizes(self, frame, grid_small):
        s = 0.5
        f = band_field(grid_small, 0.0, 20.0, seed=5)
        g = band_field(grid_small, 0.0, 20.0, seed=6)
        one = SeparableSymbol(terms=[SeparableTerm(1.0, ones_profile, ones_profile)])
        out = apply_bilinear(one, s, f, g, oscillation=True)
        r = grid_small.radius_xi()
        osc = np.exp(1j * r**s)
        ef = inverse_ft(forward_ft(f).copy_with(osc * forward_ft(f).samples))
        eg = inverse_ft(forward_ft(g).copy_with(osc * forward_ft(g).samples))
        expect = ef.samples * eg.samples
        assert np.abs(out.samples - expect).max() < 1e-10 * np.abs(expect).max()

    def test_bilinearity(self, frame, grid_small):
        s = 0.5
        f1 = band_field(grid_small, 0.0, 10.0, seed=7)
        f2 = band_field(grid_small, 0.0, 10.0, seed=8)
        g = band_field(grid_small, 0.0, 10.0, seed=9)
        sym = SeparableSymbol(terms=[SeparableTerm(0.8 + 0.1j, frame.phi, frame.phi, scale=3.0)])
        lhs = apply_bilinear(sym, s, SampledField(grid_small, 2.5 * f1.samples + f2.samples, "space"), g)
        r1 = apply_bilinear(sym, s, f1, g)
        r2 = apply_bilinear(sym, s, f2, g)
        expect = 2.5 * r1.samples + r2.samples
        assert np.abs(lhs.samples - expect).max() < 1e-10 * np.abs(expect).max()

    def test_separable_matches_dense_oracle(self, frame):
        g = GridSpec(dim=1, period=16.0, points=512)
        s = 0.7
        f = band_field(g, 0.0, 12.0, seed=10)
        h = band_field(g, 0.0, 12.0, seed=11)
        rng = np.random.default_rng(12)
        terms = []
        for _ in range(3):
            c = rng.normal() + 1j * rng.normal()
            sc = rng.uniform(1.0, 3.0)
            terms.append(SeparableTerm(c, frame.phi, frame.psi, scale=sc))
        sep = SeparableSymbol(terms=terms)
        dense = SymbolSpec(evaluator=lambda xi, eta: sep(xi, eta), order=0.0)
        out_sep = apply_bilinear(sep, s, f, h)
        out_dense = apply_bilinear(dense, s, f, h)
        scale = np.abs(out_sep.samples).max()
        assert np.abs(out_sep.samples - out_dense.samples).max() < 1e-8 * scale

    def test_dense_path_refuses_large_grid(self, frame, grid_med):
        f = band_field(grid_med, 0.0, 4.0)
        dense = SymbolSpec(evaluator=lambda xi, eta: np.ones(np.broadcast(xi, eta).shape, complex), order=0.0)
        with pytest.raises(ValueError):
            apply_bilinear(dense, 0.5, f, f)


class TestFourProductSplit:
    def test_sum_reconstructs_bilinear(self, frame, grid_small):
        s, j = 0.5, 3.0
        f = band_field(grid_small, 0.0, 30.0, seed=13)
        g = band_field(grid_small, 0.0, 30.0, seed=14)
        c = 0.7 - 0.2j
        parts = four_product_split(c, frame.phi, frame.phi, s, j, frame, f, g)
        total = c * sum(p.samples for p in parts.values())
        term = SeparableSymbol(terms=[SeparableTerm(c, frame.phi, frame.phi, scale=j)])
        direct = apply_bilinear(term, s, f, g)
        assert np.abs(total - direct.samples).max() < 1e-10 * np.abs(direct.samples).max()

    def test_low_band_input_kills_S_factor(self, frame, grid_small):
        s, j = 0.5, 3.0
        f = band_field(grid_small, 0.0, 1.0, seed=15)
        g = band_field(grid_small, 0.0, 30.0, seed=16)
        parts = four_product_split(1.0, frame.phi, frame.phi, s, j, frame, f, g)
        assert np.abs(parts["ST"].samples).max() < 1e-12
        assert np.abs(parts["SS"].samples).max() < 1e-12

    def test_high_band_inputs_leave_only_SS(self, frame, grid_small):
        s, j = 4.0, 3.0  # any s; bands matter
        f = band_field(grid_small, 2.0, 14.0, seed=17)
        g = band_field(grid_small, 2.0, 14.0, seed=18)
        parts = four_product_split(1.0, frame.phi, frame.phi, 0.5, j, frame, f, g)
        assert np.abs(parts["TT"].samples).max() < 1e-12
        assert np.abs(parts["TS"].samples).max() < 1e-12
        assert np.abs(parts["ST"].samples).max() < 1e-12
        assert np.abs(parts["SS"].samples).max() > 0


class TestGoalSum:
    def test_TT_summands_decay_like_the_order(self, frame, grid_med):
        s, m = 0.5, -0.375
        atom = make_atom("first", 0.25, grid_med)
        res = goal_sum(s, m, frame.phi, frame.phi, atom, list(range(4, 9)), frame, UV=("T", "T"),
                       omegas=[0.0, 1.0])
        rep = fit_dyadic_slope(res.summand_pairs())
        assert rep.fitted_slope <= m + 0.1

    def test_plateau_has_unit_sup(self, grid_small):
        g = modulated_plateau(grid_small, omega=8.0)
        assert lp_norm(g, np.inf) == pytest.approx(1.0, rel=1e-12)

    def test_uv_validation(self, frame, grid_small):
        atom = make_atom("first", 0.25, grid_small)
        with pytest.raises(ValueError):
            goal_sum(0.5, -0.4, frame.phi, frame.phi, atom, [4, 5, 6, 7], frame, UV=("X", "S"))
