import math

import numpy as np
import pytest

from growcell.materials import MaterialParams
from growcell.scalars import (central4_diffuse, explicit_step, mixture_diffusivity,
                              mixture_heat_capacity, stable_dt, supersaturation_rhs,
                              temperature_rhs, weno3_advect)


class TestMixtures:
    def test_endpoints_match_published_diffusivities(self):
        assert mixture_diffusivity(-1.0, 0.146, 1.1) == pytest.approx(0.146)
        assert mixture_diffusivity(+1.0, 0.146, 1.1) == pytest.approx(1.1)

    def test_midpoint(self):
        assert mixture_diffusivity(0.0, 0.146, 1.1) == pytest.approx(0.623)

    def test_heat_capacity_blend(self):
        assert mixture_heat_capacity(-1.0, 75.0, 160.5) == pytest.approx(75.0)
        assert mixture_heat_capacity(1.0, 75.0, 160.5) == pytest.approx(160.5)


class TestCentral4:
    def test_constant_field(self):
        s = np.full((16, 16), 3.7)
        rhs = central4_diffuse(s, 1.0)
        assert np.max(np.abs(rhs)) <= 1e-13

    def test_quadratic_exact(self):
        # periodic wrap breaks the seam; check interior cells only
        n = 32
        x = np.arange(n, dtype=float)
        s = np.tile((x**2)[:, None], (1, n))
        rhs = central4_diffuse(s, 1.0)
        interior = rhs[3:-3, 3:-3]
        assert np.max(np.abs(interior - 2.0)) <= 1e-10

    def test_quintic_exact_per_axis(self):
        n = 64
        x = np.arange(n, dtype=float)
        s = np.tile((0.3 * x**5 - x**3)[:, None], (1, 4))
        rhs = central4_diffuse(s, 1.0)
        expected = 0.3 * 20 * x**3 - 6 * x
        err = np.abs(rhs[5:-5, 2] - expected[5:-5])
        assert np.max(err / np.maximum(np.abs(expected[5:-5]), 1.0)) <= 1e-9

    def test_matches_classic_stencil_for_constant_coeff(self):
        rng = np.random.default_rng(3)
        s = rng.normal(size=(24, 24))
        rhs = central4_diffuse(s, 1.0)
        classic = np.zeros_like(s)
        for axis in range(2):
            for shift, coef in [(-2, -1 / 12), (-1, 4 / 3), (0, -5 / 2),
                                (1, 4 / 3), (2, -1 / 12)]:
                classic += coef * np.roll(s, shift, axis=axis)
        assert np.max(np.abs(rhs - classic)) <= 1e-12

    def test_conservation_with_variable_coeff(self):
        rng = np.random.default_rng(4)
        s = rng.normal(size=(32, 32))
        k = rng.uniform(0.1, 2.0, size=(32, 32))
        rhs = central4_diffuse(s, k)
        assert abs(rhs.sum()) <= 1e-10 * np.abs(rhs).sum()


class TestWeno3:
    def test_uniform_field(self):
        s = np.full((16, 16), 2.0)
        u = (np.full_like(s, 0.3), np.full_like(s, -0.7))
        assert np.max(np.abs(weno3_advect(s, u))) <= 1e-13

    def test_linear_exact(self):
        n = 32
        x = np.arange(n, dtype=float)
        s = np.tile((1.5 * x)[:, None], (1, n))
        u = (np.full_like(s, 0.4), np.zeros_like(s))
        rhs = weno3_advect(s, u)
        assert np.max(np.abs(rhs[3:-3, :] + 0.4 * 1.5)) <= 1e-11

    def test_sine_wave_order(self):
        # RK4 in time so the spatial order dominates; analytic translate oracle
        def run(n):
            L = n
            x = np.arange(n, dtype=float)
            s = np.sin(2 * np.pi * x / L)[:, None] * np.ones((1, 4))
            u = 0.5
            uf = (np.full_like(s, u), np.zeros_like(s))
            dt = 0.2
            steps = int(round(2 * n / u / dt / 8))  # an eighth of a period
            for _ in range(steps):
                k1 = weno3_advect(s, uf)
                k2 = weno3_advect(s + 0.5 * dt * k1, uf)
                k3 = weno3_advect(s + 0.5 * dt * k2, uf)
                k4 = weno3_advect(s + dt * k3, uf)
                s = s + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            t = steps * dt
            ref = np.sin(2 * np.pi * (x - u * t) / L)[:, None] * np.ones((1, 4))
            return math.sqrt(np.sum((s - ref) ** 2) / np.sum(ref**2))

        e1, e2 = run(32), run(64)
        assert e1 / e2 >= 2.0 ** 2.7

    def test_step_no_new_extrema(self):
        # ENO property at CFL 0.4: a clean step passes through the
        # reconstruction without creating extrema beyond rounding
        n = 64
        s0 = np.where(np.arange(n) < n // 2, 1.0, 0.0)[:, None] * np.ones((1, 4))
        uf = (np.full_like(s0, 1.0), np.zeros_like(s0))
        dt = 0.4
        s = s0 + dt * weno3_advect(s0, uf)
        assert s.max() <= 1.0 + 1e-12
        assert s.min() >= 0.0 - 1e-12
        # over many steps the smeared foot allows only far sub-percent wiggle
        for _ in range(40):
            s = s + dt * weno3_advect(s, uf)
        assert s.max() <= 1.0 + 2e-3
        assert s.min() >= 0.0 - 2e-3


class TestAssembledRhs:
    def test_quiescent_uniform_liquid(self):
        shape = (12, 12)
        U = np.full(shape, 0.045)
        phi = np.full(shape, -1.0)
        dphi = np.zeros(shape)
        vel = (np.zeros(shape), np.zeros(shape))
        rhs = supersaturation_rhs(U, phi, dphi, vel, 1.2e-3)
        assert np.max(np.abs(rhs)) <= 1e-14

    def test_deep_solid_reduces_to_sink(self):
        shape = (12, 12)
        U = np.random.default_rng(0).uniform(0, 0.05, shape)
        phi = np.full(shape, +1.0)
        dphi = np.full(shape, 1e-3)
        vel = (np.zeros(shape), np.zeros(shape))
        rhs = supersaturation_rhs(U, phi, dphi, vel, 1.2e-3)
        assert np.allclose(rhs, -0.5e-3, atol=1e-15)

    def test_growing_interface_is_a_sink(self):
        shape = (12, 12)
        U = np.full(shape, 0.045)
        phi = np.zeros(shape)
        dphi = np.zeros(shape)
        dphi[6, 6] = 2e-3
        vel = (np.zeros(shape), np.zeros(shape))
        rhs = supersaturation_rhs(U, phi, dphi, vel, 1.2e-3)
        assert rhs[6, 6] == pytest.approx(-1e-3)

    def test_uptake_scales_sink(self):
        shape = (8, 8)
        U = np.full(shape, 0.045)
        phi = np.zeros(shape)
        dphi = np.full(shape, 1e-3)
        vel = (np.zeros(shape), np.zeros(shape))
        base = supersaturation_rhs(U, phi, dphi, vel, 0.0)
        scaled = supersaturation_rhs(U, phi, dphi, vel, 0.0, uptake=12.0)
        assert np.allclose(scaled, 12.0 * base)

    def test_temperature_uniform_no_growth(self):
        shape = (12, 12)
        T = np.full(shape, 298.15)
        phi = np.zeros(shape)
        dphi = np.zeros(shape)
        vel = (np.zeros(shape), np.zeros(shape))
        rhs = temperature_rhs(T, phi, dphi, vel, MaterialParams())
        assert np.max(np.abs(rhs)) <= 1e-11

    def test_growth_pulse_heats(self):
        shape = (12, 12)
        T = np.full(shape, 298.15)
        phi = np.zeros(shape)
        dphi = np.zeros(shape)
        dphi[5, 5] = 1e-3
        vel = (np.zeros(shape), np.zeros(shape))
        rhs = temperature_rhs(T, phi, dphi, vel, MaterialParams())
        assert rhs[5, 5] > 0.0
        assert rhs[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_two_slab_steady_flux_continuity(self):
        # 1D conjugate conduction: kL | kS slab with pinned ends reaches the
        # analytic two-resistance steady profile
        mat = MaterialParams()
        n = 64
        phi1d = np.where(np.arange(n) < n // 2, -1.0, 1.0)
        phi = np.tile(phi1d[:, None], (1, 4))
        kap = mixture_diffusivity(phi, mat.kappa_liquid, mat.kappa_solid)
        cap = mixture_heat_capacity(phi, mat.vol_heat_capacity_liquid,
                                    mat.vol_heat_capacity_solid)
        cond = cap * kap
        TL, TR = 300.0, 290.0
        T = np.tile(np.linspace(TL, TR, n)[:, None], (1, 4))
        dt = 0.15 / float(kap.max())
        for _ in range(30000):
            rhs = central4_diffuse(T, cond) / cap
            T = T + dt * rhs
            T[0, :] = TL
            T[-1, :] = TR
            T[1, :] = TL   # hold two layers so the wide stencil sees the bath
            T[-2, :] = TR
        # interface temperature from series resistances of the two slabs
        kl = mat.kappa_liquid * mat.vol_heat_capacity_liquid
        ks = mat.kappa_solid * mat.vol_heat_capacity_solid
        RL, RS = (n / 2) / kl, (n / 2) / ks
        T_int = TL - (TL - TR) * RL / (RL + RS)
        measured = 0.5 * (T[n // 2 - 1, 0] + T[n // 2, 0])
        assert measured == pytest.approx(T_int, abs=0.01 * abs(TL - TR))


def test_explicit_step_and_stability_rule():
    s = np.ones((4, 4))
    assert np.array_equal(explicit_step(s, np.zeros_like(s), 0.5), s)
    dt = stable_dt(kappa_max=1.1, u_max=0.0, dx=0.1, dimension=2)
    assert dt == pytest.approx(0.8 * 0.01 / (4 * 1.1))
    dt2 = stable_dt(kappa_max=1.1, u_max=8.0, dx=0.1, dimension=2)
    assert dt2 == pytest.approx(0.8 * min(0.01 / 4.4, 0.4 * 0.1 / 8.0))
    with pytest.raises(ValueError):
        stable_dt(0.0, 0.0, 0.1, 2)
