import math

import numpy as np
import pytest

from growcell import _kernels2d as k2
from growcell.flow import (collide_stream, equilibrium, friction_force,
                           mask_velocity, moments, relaxation_from_viscosity,
                           viscosity_from_relaxation)
from growcell.lattice import make_lattice

LAT = make_lattice(2, "flow")


class TestEquilibrium:
    def test_rest_state(self):
        feq = equilibrium(np.ones((3, 3)), np.zeros((3, 3)), np.zeros((3, 3)), LAT)
        for a in range(9):
            assert np.allclose(feq[a], LAT.weights[a], atol=1e-15)
        assert feq[0, 0, 0] == pytest.approx(4.0 / 9.0)

    def test_hand_value(self):
        # rho=1, u=(0.1, 0), direction (1, 0)
        feq = equilibrium(np.array([[1.0]]), np.array([[0.1]]), np.array([[0.0]]), LAT)
        assert feq[1, 0, 0] == pytest.approx(0.147778, abs=1e-6)

    def test_moment_identities(self):
        rng = np.random.default_rng(11)
        rho = rng.uniform(0.7, 1.3, (8, 8))
        ux = rng.uniform(-0.08, 0.08, (8, 8))
        uy = rng.uniform(-0.08, 0.08, (8, 8))
        feq = equilibrium(rho, ux, uy, LAT)
        r, mx, my = moments(feq, LAT)
        assert np.max(np.abs(r - rho)) <= 1e-14
        assert np.max(np.abs(mx - rho * ux)) <= 1e-14
        assert np.max(np.abs(my - rho * uy)) <= 1e-14


class TestRelaxation:
    def test_values(self):
        assert relaxation_from_viscosity(0.0) == pytest.approx(0.5)
        assert relaxation_from_viscosity(1.0 / 6.0) == pytest.approx(1.0)

    def test_round_trip(self):
        for nu in (0.01, 0.1, 0.3):
            assert viscosity_from_relaxation(relaxation_from_viscosity(nu)) == pytest.approx(nu, rel=1e-14)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            relaxation_from_viscosity(-0.1)


class TestFriction:
    def test_pure_liquid_no_drag(self):
        fx, fy = friction_force(-1.0, 0.3, 0.1, eta_f=0.2, interface_width=2.0)
        assert fx == 0.0 and fy == 0.0

    def test_zero_velocity(self):
        fx, fy = friction_force(0.0, 0.0, 0.0, eta_f=0.2, interface_width=2.0)
        assert fx == 0.0 and fy == 0.0

    def test_interface_value(self):
        eta, w0, u = 0.2, 2.0, 0.3
        fx, _ = friction_force(0.0, u, 0.0, eta, w0)
        assert fx == pytest.approx(-2.757 * eta * u / (4 * w0**2), rel=1e-12)

    def test_mask_velocity(self):
        ux = np.full((4, 4), 0.2)
        uy = np.full((4, 4), -0.1)
        for phi, factor in [(1.0, 0.0), (-1.0, 1.0), (0.0, 0.5)]:
            mx, my = mask_velocity(ux, uy, np.full((4, 4), phi))
            assert np.allclose(mx, factor * 0.2)
            assert np.allclose(my, factor * -0.1)


class TestCollideStream:
    def test_equilibrium_fixed_point(self):
        f = equilibrium(np.ones((12, 12)), np.zeros((12, 12)), np.zeros((12, 12)), LAT)
        f0 = f.copy()
        for _ in range(25):
            f, *_ = collide_stream(f, tau=0.8, lattice=LAT)
        assert np.max(np.abs(f - f0)) <= 1e-14

    def test_pure_streaming_conserves_mass(self):
        rng = np.random.default_rng(5)
        f = rng.uniform(0.01, 1.0, (9, 10, 10))
        mass0 = f.sum()
        for _ in range(50):
            f, *_ = collide_stream(f, tau=1e12, lattice=LAT)
        assert f.sum() == pytest.approx(mass0, rel=1e-13)

    def test_long_run_mass_conservation(self):
        rng = np.random.default_rng(6)
        rho = 1.0 + 0.05 * rng.standard_normal((24, 24))
        ux = 0.02 * rng.standard_normal((24, 24))
        uy = 0.02 * rng.standard_normal((24, 24))
        f = equilibrium(rho, ux, uy, LAT)
        mass0 = f.sum()
        for _ in range(10_000):
            f, *_ = collide_stream(f, tau=0.7, lattice=LAT)
        assert abs(f.sum() - mass0) / mass0 <= 1e-12

    def test_taylor_green_viscosity(self):
        n = 64
        nu = 0.03
        tau = relaxation_from_viscosity(nu)
        k = 2.0 * math.pi / n
        x = np.arange(n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        u0 = 0.03
        ux = u0 * np.cos(k * X) * np.sin(k * Y)
        uy = -u0 * np.sin(k * X) * np.cos(k * Y)
        f = equilibrium(np.ones((n, n)), ux, uy, LAT)
        energies = {}
        n_steps = 600
        for step in range(1, n_steps + 1):
            f, rho, ux, uy, _, _ = collide_stream(f, tau=tau, lattice=LAT)
            if step in (200, 600):
                energies[step] = float(np.sum(ux**2 + uy**2))
        rate = -math.log(energies[600] / energies[200]) / 400.0
        nu_meas = rate / (4.0 * k * k)
        assert nu_meas == pytest.approx(nu, rel=0.01)

    def test_friction_kills_velocity_in_solid(self):
        # momentum trapped inside the crystal must die: the penalization
        # plus masked equilibrium cannot sustain interior flow
        n = 64
        x = np.arange(n)
        X, Y = np.meshgrid(x, x, indexing="ij")
        r = np.sqrt((X - n / 2) ** 2 + (Y - n / 2) ** 2)
        w0 = 1.5
        phi = -np.tanh((r - 14.0) / (math.sqrt(2) * w0))
        u0 = 0.05
        f = equilibrium(np.ones((n, n)), np.where(phi > 0.9, u0, 0.0),
                        np.zeros((n, n)), LAT)
        nu = 0.15
        tau = relaxation_from_viscosity(nu)
        deep = phi > 0.99
        ratio = math.inf
        for step in range(1, 2501):
            f, rho, ux, uy, usx, usy = collide_stream(
                f, tau=tau, lattice=LAT, phi=phi, nu=nu, interface_width=w0)
            if step % 250 == 0:
                ratio = float(np.sqrt(ux**2 + uy**2)[deep].max()) / u0
                if ratio <= 1e-8:
                    break
        assert ratio <= 1e-8


class TestChannelFlow:
    def test_poiseuille_profile(self):
        # body-force driven channel, halfway bounce-back walls, Re ~ 10
        nx, nfluid = 16, 64
        ny = nfluid + 4
        mask = np.zeros((nx, ny), dtype=np.int8)
        mask[:, :2] = k2.WALL
        mask[:, -2:] = k2.WALL
        nu = 0.1
        tau = relaxation_from_viscosity(nu)
        H = float(nfluid)
        u_target = 10.0 * nu / H          # Re = u H / nu = 10
        gx = 8.0 * nu * u_target / H**2

        shape = (nx, ny)
        f = np.empty((9, *shape))
        for a in range(9):
            f[a] = k2.W[a]
        post = np.empty_like(f)
        f_new = np.empty_like(f)
        phi = np.full(shape, -1.0)
        rho = np.ones(shape)
        ux = np.zeros(shape)
        uy = np.zeros(shape)
        usx = np.zeros(shape)
        usy = np.zeros(shape)
        fx = np.zeros(shape)
        fy = np.zeros(shape)
        for _ in range(40_000):
            k2.flow_macros(f, phi, mask, 0.0, 0.0, gx, 0.0,
                           rho, ux, uy, usx, usy, fx, fy)
            k2.flow_collide(f, post, rho, usx, usy, fx, fy, mask, tau)
            k2.flow_stream(post, f_new, mask, 0.0, 0.0, rho, usx, usy)
            f, f_new = f_new, f
        k2.flow_macros(f, phi, mask, 0.0, 0.0, gx, 0.0,
                       rho, ux, uy, usx, usy, fx, fy)
        y = np.arange(2, ny - 2, dtype=float)
        yw0, yw1 = 1.5, ny - 2.5   # halfway wall planes
        analytic = gx / (2.0 * nu) * (y - yw0) * (yw1 - y)
        profile = ux[nx // 2, 2:-2]
        err = math.sqrt(np.sum((profile - analytic) ** 2) / np.sum(analytic**2))
        assert err <= 1e-3
