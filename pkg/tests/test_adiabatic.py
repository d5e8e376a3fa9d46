import math

import numpy as np
import pytest

from growcell.adiabatic import (OdeState, equilibrium_state, integrate, ode_rhs,
                                solid_heat_capacity)
from growcell.materials import MaterialParams, c_sat

MAT = MaterialParams()


class TestRhs:
    def test_equilibrium_is_fixed_point(self):
        T = 298.15
        state = OdeState(c=c_sat(T), R=0.1, T=T)
        dc, dR, dT = ode_rhs(state, MAT)
        assert dc == 0.0 and dR == 0.0 and dT == 0.0

    def test_signs_during_growth(self):
        state = OdeState(c=8.87e-4, R=0.1, T=298.15)
        dc, dR, dT = ode_rhs(state, MAT)
        assert dc < 0.0 and dR > 0.0 and dT > 0.0

    def test_initial_rate_value(self):
        # dR/dt = k / rho_molar * (c - c_sat), evaluated symbolically
        state = OdeState(c=8.87e-4, R=0.1, T=298.15)
        _, dR, _ = ode_rhs(state, MAT)
        drive = 8.87e-4 - c_sat(298.15)
        expected = 1.0e-5 / (1.341 / 152.15) * drive
        assert dR == pytest.approx(expected, rel=1e-12)

    def test_concentration_rate_scales_with_area(self):
        s1 = OdeState(c=8.87e-4, R=0.1, T=298.15)
        s2 = OdeState(c=8.87e-4, R=0.2, T=298.15)
        dc1 = ode_rhs(s1, MAT)[0]
        dc2 = ode_rhs(s2, MAT)[0]
        assert dc2 == pytest.approx(4.0 * dc1, rel=1e-12)


class TestIntegrate:
    def test_constant_at_equilibrium(self):
        T = 298.15
        traj = integrate(OdeState(c_sat(T), 0.1, T), t_end=1000.0, dt=1.0,
                         params=MAT, output_every=100)
        assert max(abs(c - c_sat(T)) for c in traj.c) <= 1e-18
        assert traj.R[-1] == pytest.approx(0.1, abs=1e-15)

    def test_step_halving(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        t1 = integrate(s0, t_end=5.0e4, dt=50.0, params=MAT, kinetics_scale=10.0)
        t2 = integrate(s0, t_end=5.0e4, dt=25.0, params=MAT, kinetics_scale=10.0)
        for a, b in [(t1.c[-1], t2.c[-1]), (t1.R[-1], t2.R[-1]), (t1.T[-1], t2.T[-1])]:
            assert abs(a - b) / abs(b) <= 1e-8

    def test_monotone_trajectories(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=3.0e5, dt=20.0, params=MAT, kinetics_scale=10.0,
                         equilibrium_tol=1e-8)
        c = np.array(traj.c)
        R = np.array(traj.R)
        T = np.array(traj.T)
        assert np.all(np.diff(c) <= 1e-18)
        assert np.all(np.diff(R) >= -1e-18)
        assert np.all(np.diff(T) >= -1e-18)
        assert traj.converged

    def test_mass_closure(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=3.0e5, dt=20.0, params=MAT, kinetics_scale=10.0)
        rho_m = MAT.molar_density_solid
        for c, R in zip(traj.c, traj.R):
            lhs = 1.0 * (8.87e-4 - c)
            rhs = rho_m * (4.0 * math.pi / 3.0) * (R**3 - 0.1**3)
            assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-18)

    def test_energy_closure(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=3.0e5, dt=10.0, params=MAT, kinetics_scale=10.0,
                         output_every=1)
        # heat released must equal the enthalpy rise of liquid + solid,
        # integrating the current capacity over the temperature path
        rho_m = MAT.molar_density_solid
        released = -MAT.dH_cryst * 1e3 * rho_m * (4 * math.pi / 3) * (traj.R[-1]**3 - 0.1**3)
        absorbed = 0.0
        for i in range(1, len(traj.times)):
            cap_mid = (1.0 * MAT.vol_heat_capacity_liquid
                       + 0.5 * (solid_heat_capacity(traj.R[i - 1], MAT)
                                + solid_heat_capacity(traj.R[i], MAT)))
            absorbed += cap_mid * (traj.T[i] - traj.T[i - 1])
        assert absorbed == pytest.approx(released, rel=1e-6)

    def test_equilibrium_consistency(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=3.0e6, dt=25.0, params=MAT, kinetics_scale=10.0)
        fin = traj.final()
        assert abs(fin.c - c_sat(fin.T)) <= 1e-9

    def test_matches_conservation_fixed_point(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=3.0e6, dt=25.0, params=MAT, kinetics_scale=10.0)
        fin = traj.final()
        eq = equilibrium_state(8.87e-4, 0.1, 298.15, MAT)
        assert fin.c == pytest.approx(eq.c, rel=2e-3)
        assert fin.R == pytest.approx(eq.R, rel=2e-3)
        assert fin.T == pytest.approx(eq.T, rel=2e-5)

    def test_heat_release_rises_then_decays(self):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=3.0e6, dt=25.0, params=MAT, kinetics_scale=10.0)
        q = traj.heat_rate
        assert q[0] > 0
        peak = max(q)
        assert q.index(peak) < len(q) - 1
        assert q[-1] <= 1e-6 * peak

    def test_box_edge_guard(self):
        s0 = OdeState(8.87e-4, 0.47, 298.15)
        with pytest.raises(RuntimeError, match="box edge"):
            integrate(s0, t_end=3.0e6, dt=25.0, params=MAT, kinetics_scale=50.0,
                      box_edge=0.95)

    def test_csv_output(self, tmp_path):
        s0 = OdeState(8.87e-4, 0.1, 298.15)
        traj = integrate(s0, t_end=1.0e3, dt=10.0, params=MAT)
        path = tmp_path / "traj.csv"
        traj.write_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0].startswith("t_s,")
        assert len(lines) == len(traj.times) + 1
