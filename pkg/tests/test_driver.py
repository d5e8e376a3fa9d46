import numpy as np
import pytest

from growcell import _kernels2d as k2
from growcell.driver import Reactor2D, ScenarioConfig, auto_dt, reynolds
from growcell.geometry import (FLUID, INLET, OUTLET, WALL, GeometryError,
                               SeedSpec, closed_box, reactor)
from growcell.materials import MaterialParams


def small_config(**overrides):
    base = dict(dx=0.25, diameter=8.0, channel_width=2.0, t_end=5.0,
                output_every=5.0, U0=0.045, T_wall=298.15,
                seed=SeedSpec(shape="hexagon", radius=0.75),
                kappa_scale=1.0 / 15.0, tau0_scale=115.0)
    base.update(overrides)
    return ScenarioConfig(**base)


class TestGeometry:
    def test_reactor_tags(self):
        geom = reactor(0.2, diameter=10.0, channel_width=2.0)
        assert np.any(geom.tags == INLET)
        assert np.any(geom.tags == OUTLET)
        assert np.any(geom.tags == FLUID)
        geom.validate()

    def test_baffle_positions_are_walls(self):
        base = reactor(0.2, diameter=10.0, channel_width=2.0, baffle_position=0)
        for pos in (1, 2, 3):
            geom = reactor(0.2, diameter=10.0, channel_width=2.0, baffle_position=pos)
            extra = np.sum((geom.tags == WALL) & (base.tags != WALL))
            assert extra > 0, f"baffle {pos} added no wall cells"

    def test_bad_baffle_rejected(self):
        with pytest.raises(GeometryError):
            reactor(0.2, baffle_position=5)

    def test_seed_overlap_rejected(self):
        with pytest.raises(GeometryError, match="overlaps"):
            reactor(0.2, diameter=6.0, channel_width=2.0,
                    seed=SeedSpec(shape="sphere", radius=4.0))

    def test_closed_box(self):
        geom = closed_box((10, 10), 0.2)
        assert geom.tags.shape == (14, 14)
        assert np.all(geom.tags[0, :] == WALL)
        assert np.sum(geom.tags == FLUID) == 100


class TestFixedPoint:
    def test_all_liquid_quiescent_state_is_stationary(self):
        cfg = small_config(seed=SeedSpec(shape="none", radius=0.0))
        sim = Reactor2D(cfg)
        phi0 = sim.phi.copy()
        U0 = sim.U.copy()
        T0 = sim.T.copy()
        for _ in range(50):
            sim.step()
        assert np.max(np.abs(sim.phi - phi0)) <= 1e-12
        assert np.max(np.abs(sim.U - U0)) <= 1e-12
        assert np.max(np.abs(sim.T - T0)) <= 1e-12


class TestBoundaries:
    def test_inlet_holds_supersaturation_and_walls_hold_temperature(self):
        cfg = small_config(u_in=2.0, t_end=1.0)
        sim = Reactor2D(cfg)
        for _ in range(30):
            sim.step()
        inlet = sim.mask == INLET
        wall = sim.mask == WALL
        assert np.max(np.abs(sim.U[inlet] - cfg.U0)) == 0.0
        assert np.max(np.abs(sim.T[wall & self._adjacent_to_fluid(sim)] - cfg.T_wall)) == 0.0

    @staticmethod
    def _adjacent_to_fluid(sim):
        fluid = sim.mask == FLUID
        adj = np.zeros_like(fluid)
        adj[1:, :] |= fluid[:-1, :]
        adj[:-1, :] |= fluid[1:, :]
        adj[:, 1:] |= fluid[:, :-1]
        adj[:, :-1] |= fluid[:, 1:]
        return adj

    def test_inlet_outlet_mass_flux_balance(self):
        cfg = small_config(dx=0.2, u_in=4.0, t_end=1.0,
                           seed=SeedSpec(shape="hexagon", radius=0.75))
        sim = Reactor2D(cfg)
        for _ in range(2500):
            sim.step()
        k2.flow_macros(sim.f, sim.phi, sim.mask, sim.nu_lat,
                       1.0 / (4.0 * sim.w0_lat**2), 0.0, 0.0,
                       sim.rho, sim.ux, sim.uy, sim.usx, sim.usy,
                       sim.fx, sim.fy)
        fluid = sim.mask == FLUID
        cols = np.where(fluid.any(axis=1))[0]
        cin, cout = cols[0], cols[-1]
        flux_in = float((sim.rho[cin] * sim.ux[cin] * fluid[cin]).sum())
        flux_out = float((sim.rho[cout] * sim.ux[cout] * fluid[cout]).sum())
        assert flux_in > 0
        assert flux_out == pytest.approx(flux_in, rel=0.01)


class TestDeterminism:
    def test_bitwise_across_thread_counts(self):
        results = {}
        for threads in (1, 2):
            cfg = small_config(threads=threads, u_in=2.0)
            sim = Reactor2D(cfg)
            for _ in range(150):
                sim.step()
            results[threads] = (sim.phi.copy(), sim.U.copy(), sim.T.copy(), sim.f.copy())
        for a, b in zip(results[1], results[2]):
            assert np.array_equal(a, b)

    def test_bitwise_across_runs(self):
        def run():
            sim = Reactor2D(small_config(u_in=2.0))
            for _ in range(100):
                sim.step()
            return sim.phi.copy(), sim.U.copy()
        p1, u1 = run()
        p2, u2 = run()
        assert np.array_equal(p1, p2)
        assert np.array_equal(u1, u2)

    def test_checkpoint_restore_round_trip(self, tmp_path):
        cfg = small_config(u_in=2.0)
        ref = Reactor2D(cfg)
        for _ in range(120):
            ref.step()

        sim = Reactor2D(cfg)
        for _ in range(60):
            sim.step()
        path = tmp_path / "ckpt.npz"
        sim.save_checkpoint(path)

        resumed = Reactor2D(cfg)
        resumed.load_checkpoint(path)
        assert resumed.step_index == 60
        for _ in range(60):
            resumed.step()
        assert np.array_equal(resumed.phi, ref.phi)
        assert np.array_equal(resumed.U, ref.U)
        assert np.array_equal(resumed.T, ref.T)
        assert np.array_equal(resumed.f, ref.f)


class TestClosedBoxConservation:
    def test_scalar_conservation_10k_steps(self):
        # static solid blob, no growth, zero-flux walls: both solute and
        # capacity-weighted heat integrals must hold to 1e-8 relative
        geom = closed_box((40, 40), 0.2)
        mask = geom.tags
        shape = mask.shape
        rng = np.random.default_rng(3)
        x = np.arange(shape[0], dtype=float)
        X, Y = np.meshgrid(x, np.arange(shape[1], dtype=float), indexing="ij")
        r = np.sqrt((X - 22) ** 2 + (Y - 22) ** 2)
        phi = -np.tanh((r - 8.0) / 2.0)
        phi[mask != FLUID] = -1.0
        U = np.where(mask == FLUID, 0.045 + 0.02 * rng.standard_normal(shape), 0.0)
        T = np.where(mask == FLUID, 298.15 + rng.standard_normal(shape), 298.15)
        dphi = np.zeros(shape)
        zero = np.zeros(shape)
        U_new = np.empty(shape)
        T_new = np.empty(shape)
        mat = MaterialParams()
        capL, capS = mat.vol_heat_capacity_liquid, mat.vol_heat_capacity_solid
        cap = 0.5 * ((1 - phi) * capL + (1 + phi) * capS)
        fluid = mask == FLUID

        sumU0 = float(U[fluid].sum())
        sumH0 = float((cap * T)[fluid].sum())
        for _ in range(10_000):
            k2.scalar_step(U, T, U_new, T_new, phi, dphi, zero, zero, mask,
                           0.12, 0.01, 0.08, capL, capS, 1.0, mat.heat_of_growth,
                           0, 298.15, 0.045, 1.0)
            U, U_new = U_new, U
            T, T_new = T_new, T
        assert abs(float(U[fluid].sum()) - sumU0) / abs(sumU0) <= 1e-8
        assert abs(float((cap * T)[fluid].sum()) - sumH0) / abs(sumH0) <= 1e-8


class TestReynolds:
    def test_published_pairing(self):
        assert reynolds(8.0, 1.5, 1.0) == pytest.approx(12.0)

    def test_zero_and_linearity(self):
        assert reynolds(0.0, 1.5, 1.0) == 0.0
        assert reynolds(16.0, 1.5, 1.0) == pytest.approx(2 * reynolds(8.0, 1.5, 1.0))

    def test_positive_inputs_required(self):
        with pytest.raises(ValueError):
            reynolds(8.0, 0.0, 1.0)


def test_auto_dt_limits_scale():
    cfg = small_config()
    dt = auto_dt(cfg)
    assert dt > 0
    # inlet velocity introduces the acoustic ceiling
    dt_flow = auto_dt(small_config(u_in=14.0))
    assert dt_flow <= 0.15 * 0.25 / 14.0 + 1e-15
