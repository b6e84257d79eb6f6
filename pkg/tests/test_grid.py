import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscillab import (
    AliasingError,
    GridSpec,
    SampledField,
    bmo_estimate,
    fit_dyadic_slope,
    forward_ft,
    inverse_ft,
    lp_norm,
)


def band_limited(grid, band, seed=0):
    rng = np.random.default_rng(seed)
    mask = grid.radius_xi() <= band
    coef = np.where(mask, rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape), 0.0)
    return inverse_ft(SampledField(grid, coef, "frequency"))


class TestGridSpec:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            GridSpec(dim=1, period=32.0, points=1000)

    def test_rejects_bad_dim_and_period(self):
        with pytest.raises(ValueError):
            GridSpec(dim=3, period=32.0, points=64)
        with pytest.raises(ValueError):
            GridSpec(dim=1, period=-1.0, points=64)

    def test_band_check(self):
        g = GridSpec(dim=1, period=32.0, points=4096)
        g.check_band(g.max_resolved_freq / 2.0)
        with pytest.raises(AliasingError):
            g.check_band(g.max_resolved_freq / 1.5)

    def test_axes(self):
        g = GridSpec(dim=1, period=8.0, points=64)
        x = g.axis_x()
        assert x[0] == -4.0 and np.isclose(x[1] - x[0], g.dx)
        assert np.isclose(g.axis_xi()[1] - g.axis_xi()[0], 2 * np.pi / 8.0)


class TestTransforms:
    def test_gaussian_pair_forward(self):
        g = GridSpec(dim=1, period=64.0, points=2**14)
        x = g.axis_x()
        f = SampledField(g, np.exp(-(x**2) / 2).astype(complex), "space")
        F = forward_ft(f)
        xi = g.axis_xi()
        exact = np.sqrt(2 * np.pi) * np.exp(-(xi**2) / 2)
        sel = np.abs(xi) < 8
        err = np.abs(F.samples[sel] - exact[sel]).max() / exact.max()
        assert err < 1e-10

    def test_gaussian_pair_inverse(self):
        g = GridSpec(dim=1, period=64.0, points=2**14)
        xi = g.axis_xi()
        F = SampledField(g, (np.sqrt(2 * np.pi) * np.exp(-(xi**2) / 2)).astype(complex), "frequency")
        f = inverse_ft(F)
        x = g.axis_x()
        exact = np.exp(-(x**2) / 2)
        assert np.abs(f.samples - exact).max() < 1e-10

    def test_grid_exponential_is_a_spike(self):
        g = GridSpec(dim=1, period=32.0, points=4096)
        k0 = g.axis_xi()[g.points // 2 + 40]
        f = SampledField(g, np.exp(1j * k0 * g.axis_x()), "space")
        F = forward_ft(f)
        peak = np.argmax(np.abs(F.samples))
        assert np.isclose(g.axis_xi()[peak], k0)
        assert np.isclose(np.abs(F.samples[peak]), g.period, rtol=1e-12)
        rest = np.delete(np.abs(F.samples), peak)
        assert rest.max() < 1e-9 * g.period

    def test_spike_inverts_to_exponential(self):
        g = GridSpec(dim=1, period=32.0, points=4096)
        idx = g.points // 2 + 17
        coef = np.zeros(g.points, dtype=complex)
        coef[idx] = g.period
        f = inverse_ft(SampledField(g, coef, "frequency"))
        exact = np.exp(1j * g.axis_xi()[idx] * g.axis_x())
        assert np.abs(f.samples - exact).max() < 1e-12

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_round_trip(self, grid_small, seed):
        f = band_limited(grid_small, band=50.0, seed=seed)
        back = inverse_ft(forward_ft(f))
        assert np.abs(back.samples - f.samples).max() < 1e-12 * np.abs(f.samples).max()

    def test_round_trip_ated_2d(self, grid_2d):
        f = band_limited(grid_2d, band=10.0, seed=3)
        back = inverse_ft(forward_ft(f))
        assert np.abs(back.samples - f.samples).max() < 1e-12 * np.abs(f.samples).max()

    def test_plancherel(self, grid_small):
        f = band_limited(grid_small, band=60.0, seed=5)
        F = forward_ft(f)
        lhs = lp_norm(f, 2.0) ** 2
        rhs = np.sum(np.abs(F.samples) ** 2) * grid_small.dxi / (2 * np.pi)
        assert abs(lhs - rhs) < 1e-10 * lhs

    def test_domain_tags_enforced(self, grid_small):
        f = band_limited(grid_small, band=10.0)
        with pytest.raises(ValueError):
            inverse_ft(f)
        with pytest.raises(ValueError):
            forward_ft(forward_ft(f))


class TestLpNorm:
    def test_indicator_l2(self):
        g = GridSpec(dim=1, period=32.0, points=2**14)
        x = g.axis_x()
        f = SampledField(g, ((x >= 0) & (x < 1)).astype(complex), "space")
        assert abs(lp_norm(f, 2.0) - 1.0) <= g.dx

    def test_sup_is_grid_max(self, grid_small, rng):
        vals = rng.normal(size=grid_small.points) + 1j * rng.normal(size=grid_small.points)
        f = SampledField(grid_small, vals, "space")
        assert lp_norm(f, np.inf) == np.abs(vals).max()

    def test_rejects_p_below_one(self, grid_small):
        f = band_limited(grid_small, 10.0)
        with pytest.raises(ValueError):
            lp_norm(f, 0.5)

    @settings(max_examples=20, deadline=None)
    @given(p=st.sampled_from([1.0, 1.5, 2.0, 3.0, np.inf]), seed=st.integers(0, 50))
    def test_homogeneous_and_triangle(self, p, seed):
        g = GridSpec(dim=1, period=16.0, points=512)
        rng = np.random.default_rng(seed)
        a = rng.normal(size=512) + 1j * rng.normal(size=512)
        b = rng.normal(size=512) + 1j * rng.normal(size=512)
        fa = SampledField(g, a, "space")
        fb = SampledField(g, b, "space")
        fab = SampledField(g, a + b, "space")
        fsc = SampledField(g, 3.7 * a, "space")
        assert np.isclose(lp_norm(fsc, p), 3.7 * lp_norm(fa, p), rtol=1e-12)
        assert lp_norm(fab, p) <= lp_norm(fa, p) + lp_norm(fb, p) + 1e-12


class TestBmoEstimate:
    def test_constant_is_zero(self, grid_small):
        f = SampledField(grid_small, np.full(grid_small.points, 2.5 + 0j), "space")
        assert bmo_estimate(f) == 0.0

    def test_two_value_step(self):
        g = GridSpec(dim=1, period=32.0, points=4096)
        x = g.axis_x()
        h = 0.7
        cell = 1.0  # dyadic cell of 128 samples
        vals = np.zeros(g.points)
        vals[(x >= 0) & (x < cell)] = h
        vals[(x >= cell) & (x < 2 * cell)] = -h
        f = SampledField(g, vals.astype(complex), "space")
        est = bmo_estimate(f)
        assert abs(est - h) < 0.02 * h

    def test_2d_step(self, grid_2d):
        vals = np.zeros((grid_2d.points,) * 2)
        vals[: grid_2d.points // 2] = 1.0
        f = SampledField(grid_2d, vals.astype(complex), "space")
        assert 0.4 < bmo_estimate(f) <= 0.55


class TestSlopeFit:
    def test_exact_geometric(self):
        js = range(4, 10)
        rep = fit_dyadic_slope([(j, 2.0 ** (3 * j)) for j in js])
        assert rep.fitted_slope == pytest.approx(3.0, abs=1e-12)
        assert rep.max_residual < 1e-12

    def test_constant_series(self):
        rep = fit_dyadic_slope([(j, 5.0) for j in range(6)])
        assert rep.fitted_slope == pytest.approx(0.0, abs=1e-13)

    def test_perturbed_recovery(self):
        rng = np.random.default_rng(99)
        js = np.arange(4, 14)
        vals = 0.37 * 2.0 ** (1.5 * js) * (1.0 + rng.uniform(-0.01, 0.01, js.size))
        rep = fit_dyadic_slope(list(zip(js, vals)), predicted_slope=1.5)
        assert abs(rep.fitted_slope - 1.5) < 0.02

    def test_rejects_short_or_nonpositive(self):
        with pytest.raises(ValueError):
            fit_dyadic_slope([(1, 2.0), (2, 4.0), (3, 8.0)])
        with pytest.raises(ValueError):
            fit_dyadic_slope([(1, 2.0), (2, -4.0), (3, 8.0), (4, 16.0)])

    @settings(max_examples=15, deadline=None)
    @given(slope=st.floats(-3, 3), inter=st.floats(-2, 2))
    def test_recovers_any_exact_line(self, slope, inter):
        js = np.arange(0, 8)
        rep = fit_dyadic_slope([(j, 2.0 ** (inter + slope * j)) for j in js])
        assert rep.fitted_slope == pytest.approx(slope, abs=1e-8)
        assert rep.max_residual < 1e-8
