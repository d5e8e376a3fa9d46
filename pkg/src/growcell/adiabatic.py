"""Zero-dimensional model of the adiabatic single-crystal growth cell.

A spherical crystal grows in a closed box: the liquid concentration
falls, the radius rises, and the released crystallization enthalpy
heats the cell until concentration and saturation meet. The three
coupled balances are integrated with classical RK4 and serve as ground
truth for the full solver in the closed-cell verification.

Densities enter as molar densities (rho / molar mass) so that the mass
and energy budgets close exactly in mol and J.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .materials import MaterialParams, c_sat


@dataclass
class OdeState:
    c: float  # liquid concentration, mol/cm^3
    R: float  # crystal radius, cm
    T: float  # temperature, K


@dataclass
class Trajectory:
    times: list[float]
    c: list[float]
    R: list[float]
    T: list[float]
    heat_rate: list[float]  # J/s released
    converged: bool

    def final(self) -> OdeState:
        return OdeState(self.c[-1], self.R[-1], self.T[-1])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_s", "c_mol_per_cm3", "R_cm", "T_K", "heat_rate_W"])
            for row in zip(self.times, self.c, self.R, self.T, self.heat_rate):
                writer.writerow(row)


def solid_heat_capacity(R: float, params: MaterialParams) -> float:
    """J/K of the crystal sphere."""
    return (4.0 / 3.0) * math.pi * R**3 * params.vol_heat_capacity_solid


def ode_rhs(state: OdeState, params: MaterialParams, volume_liquid: float = 1.0,
            kinetics_scale: float = 1.0) -> tuple[float, float, float]:
    """Time derivatives (dc/dt, dR/dt, dT/dt) of the closed cell."""
    k = params.k0 * kinetics_scale  # cm/s
    area = 4.0 * math.pi * state.R**2
    drive = state.c - c_sat(state.T)
    flux = k * area * drive  # mol/s

    dc = -flux / volume_liquid
    dR = k * drive / params.molar_density_solid
    capacity = (volume_liquid * params.vol_heat_capacity_liquid
                + solid_heat_capacity(state.R, params))
    dT = -(params.dH_cryst * 1.0e3) * flux / capacity
    return dc, dR, dT


def integrate(state0: OdeState, t_end: float, dt: float,
              params: MaterialParams | None = None,
              volume_liquid: float = 1.0,
              box_edge: float = 1.0,
              kinetics_scale: float = 1.0,
              output_every: int = 100,
              equilibrium_tol: float = 1.0e-12) -> Trajectory:
    """RK4 trajectory of the closed cell, sampled every ``output_every`` steps.

    Returns converged=False if the driving force has not collapsed below
    ``equilibrium_tol`` (mol/cm^3) by t_end; that is reported, not fatal.
    The run aborts if the sphere would touch the box walls.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    params = params or MaterialParams()

    def rhs(y):
        return ode_rhs(OdeState(*y), params, volume_liquid, kinetics_scale)

    y = [state0.c, state0.R, state0.T]
    t = 0.0
    n_steps = max(1, int(round(t_end / dt)))
    traj = Trajectory([t], [y[0]], [y[1]], [y[2]],
                      [_heat_rate(y, params, kinetics_scale)], converged=False)
    for step in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs([y[i] + 0.5 * dt * k1[i] for i in range(3)])
        k3 = rhs([y[i] + 0.5 * dt * k2[i] for i in range(3)])
        k4 = rhs([y[i] + dt * k3[i] for i in range(3)])
        y = [y[i] + dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
             for i in range(3)]
        t = step * dt
        if 2.0 * y[1] > box_edge:
            raise RuntimeError(
                f"crystal diameter {2.0 * y[1]:.4f} cm exceeds the box edge {box_edge} cm"
            )
        if step % output_every == 0 or step == n_steps:
            traj.times.append(t)
            traj.c.append(y[0])
            traj.R.append(y[1])
            traj.T.append(y[2])
            traj.heat_rate.append(_heat_rate(y, params, kinetics_scale))
    traj.converged = abs(y[0] - c_sat(y[2])) < equilibrium_tol
    return traj


def _heat_rate(y, params: MaterialParams, kinetics_scale: float) -> float:
    area = 4.0 * math.pi * y[1] ** 2
    flux = params.k0 * kinetics_scale * area * (y[0] - c_sat(y[2]))
    return max(-(params.dH_cryst * 1.0e3) * flux, 0.0) if flux > 0 else \
        -(params.dH_cryst * 1.0e3) * flux


def equilibrium_state(c0: float, R0: float, T0: float,
                      params: MaterialParams | None = None,
                      volume_liquid: float = 1.0) -> OdeState:
    """Fixed point of the closed cell from conservation alone.

    Solves c_f = c_sat(T_f) together with the mass and energy budgets;
    used as an independent cross-check on the integrated trajectory.
    """
    params = params or MaterialParams()
    rho_m = params.molar_density_solid
    vs0 = (4.0 / 3.0) * math.pi * R0**3
    dH = -params.dH_cryst * 1.0e3  # J/mol released

    dvs = 0.0
    for _ in range(200):
        capacity = (volume_liquid * params.vol_heat_capacity_liquid
                    + (vs0 + dvs) * params.vol_heat_capacity_solid)
        T = T0 + dH * rho_m * dvs / capacity
        c_target = c_sat(T)
        dvs_new = volume_liquid * (c0 - c_target) / rho_m
        if abs(dvs_new - dvs) < 1.0e-16:
            dvs = dvs_new
            break
        dvs = dvs_new
    capacity = (volume_liquid * params.vol_heat_capacity_liquid
                + (vs0 + dvs) * params.vol_heat_capacity_solid)
    T = T0 + dH * rho_m * dvs / capacity
    R = ((vs0 + dvs) * 3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    return OdeState(c_sat(T), R, T)
