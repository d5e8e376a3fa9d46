"""Finite-difference transport of supersaturation and temperature.

Advection uses a third-order upwind WENO reconstruction of the
directional derivatives; diffusion uses a conservative fourth-order
flux form that collapses to the classic five-point-per-axis stencil
(-1/12, 4/3, -5/2, 4/3, -1/12)/dx^2 for a constant coefficient. Time
stepping is first-order explicit, so the step size is bounded by the
diffusive limit of the stiffest coefficient (thermal, in this system).

The functions here operate on plain arrays in lattice units (dx = dt = 1
unless stated otherwise) with periodic wrapping; they are the reference
implementations that the fused simulation kernels are checked against,
and they run the diffusion benchmark directly.
"""

from __future__ import annotations

import numpy as np

WENO_EPS = 1.0e-6

DEFAULT_SAFETY = 0.8
DEFAULT_CFL = 0.4


def mixture_diffusivity(phi, kappa_liquid: float, kappa_solid: float):
    """Phase-weighted thermal diffusivity ((1-phi) kL + (1+phi) kS)/2."""
    return ((1.0 - phi) * kappa_liquid + (1.0 + phi) * kappa_solid) * 0.5


def mixture_heat_capacity(phi, cp_liquid: float, cp_solid: float):
    """Phase-weighted molar heat capacity, same blend as the diffusivity."""
    return ((1.0 - phi) * cp_liquid + (1.0 + phi) * cp_solid) * 0.5


def solute_mobility(phi):
    """One-sided diffusion weight: 1 in liquid, 0 in solid.

    The raw (1 - phi) form would double the pure-liquid diffusivity, so
    it is normalized by 1/2; diffusion still vanishes identically inside
    the solid.
    """
    return np.maximum((1.0 - phi) * 0.5, 0.0)


def _weno3_axis(s: np.ndarray, u: np.ndarray, axis: int, dx: float = 1.0) -> np.ndarray:
    """Upwind WENO3 approximation of u * ds/dx along one axis (periodic)."""
    sm2 = np.roll(s, 2, axis=axis)
    sm1 = np.roll(s, 1, axis=axis)
    sp1 = np.roll(s, -1, axis=axis)
    sp2 = np.roll(s, -2, axis=axis)

    # left-biased candidates (for u > 0)
    d0m = (sm2 - 4.0 * sm1 + 3.0 * s) / (2.0 * dx)
    d1 = (sp1 - sm1) / (2.0 * dx)
    b0m = (sm2 - 2.0 * sm1 + s) ** 2
    b1 = (sm1 - 2.0 * s + sp1) ** 2
    a0 = (1.0 / 3.0) / (WENO_EPS + b0m) ** 2
    a1 = (2.0 / 3.0) / (WENO_EPS + b1) ** 2
    dminus = (a0 * d0m + a1 * d1) / (a0 + a1)

    # right-biased candidates (for u < 0)
    d0p = (-3.0 * s + 4.0 * sp1 - sp2) / (2.0 * dx)
    b0p = (s - 2.0 * sp1 + sp2) ** 2
    a0p = (1.0 / 3.0) / (WENO_EPS + b0p) ** 2
    dplus = (a0p * d0p + a1 * d1) / (a0p + a1)

    return u * np.where(u > 0.0, dminus, dplus)


def weno3_advect(s: np.ndarray, velocity: tuple[np.ndarray, ...], dx: float = 1.0) -> np.ndarray:
    """Convective right-hand side -u . grad(s) on a periodic grid.

    ``velocity`` holds the masked velocity components, one array per
    axis; supply the already phase-masked field so solid regions do not
    advect.
    """
    rhs = np.zeros_like(s)
    for axis, u in enumerate(velocity):
        rhs -= _weno3_axis(s, u, axis, dx)
    return rhs


def _face_flux_axis(s: np.ndarray, coeff: np.ndarray, axis: int, dx: float) -> np.ndarray:
    """Fourth-order diffusive flux at the i+1/2 faces along one axis."""
    sm1 = np.roll(s, 1, axis=axis)
    sp1 = np.roll(s, -1, axis=axis)
    sp2 = np.roll(s, -2, axis=axis)
    grad = (sm1 - 15.0 * s + 15.0 * sp1 - sp2) / (12.0 * dx)

    km1 = np.roll(coeff, 1, axis=axis)
    kp1 = np.roll(coeff, -1, axis=axis)
    kp2 = np.roll(coeff, -2, axis=axis)
    kface = (-km1 + 9.0 * coeff + 9.0 * kp1 - kp2) / 16.0
    np.maximum(kface, 0.0, out=kface)
    return kface * grad


def central4_diffuse(s: np.ndarray, coeff: np.ndarray | float, dx: float = 1.0) -> np.ndarray:
    """Diffusive right-hand side div(coeff grad s) on a periodic grid."""
    if np.isscalar(coeff):
        coeff = np.full_like(s, float(coeff))
    rhs = np.zeros_like(s)
    for axis in range(s.ndim):
        flux = _face_flux_axis(s, coeff, axis, dx)
        rhs += (flux - np.roll(flux, 1, axis=axis)) / dx
    return rhs


def supersaturation_rhs(U, phi, dphi_dt, velocity, diffusivity: float,
                        dx: float = 1.0, uptake: float = 1.0):
    """Right-hand side of the supersaturation equation.

    Advection with the masked velocity, one-sided diffusion with
    coefficient D * (1-phi)/2, and the interface sink -uptake/2 * dphi/dt.
    ``uptake`` is the supersaturation consumed per unit of solid formed;
    the bare equation corresponds to uptake = 1.
    """
    rhs = weno3_advect(U, velocity, dx)
    rhs += central4_diffuse(U, diffusivity * solute_mobility(phi), dx)
    rhs -= 0.5 * uptake * dphi_dt
    return rhs


def temperature_rhs(T, phi, dphi_dt, velocity, params, dx: float = 1.0):
    """Right-hand side of the temperature equation, physical units.

    Conduction is in conservative form with the volumetric heat capacity
    inside the flux, and latent heat enters as released enthalpy per
    solid volume divided by the local volumetric heat capacity, so that
    the domain integral of capacity-weighted heating equals the enthalpy
    of the newly formed solid.
    """
    kappa = mixture_diffusivity(phi, params.kappa_liquid, params.kappa_solid)
    cap = mixture_heat_capacity(phi, params.vol_heat_capacity_liquid,
                                params.vol_heat_capacity_solid)
    rhs = weno3_advect(T, velocity, dx)
    rhs += central4_diffuse(T, cap * kappa, dx) / cap
    rhs += 0.5 * (params.heat_of_growth / cap) * dphi_dt
    return rhs


def explicit_step(s: np.ndarray, rhs: np.ndarray, dt: float) -> np.ndarray:
    """First-order explicit update."""
    return s + dt * rhs


def stable_dt(kappa_max: float, u_max: float, dx: float, dimension: int,
              safety: float = DEFAULT_SAFETY, cfl: float = DEFAULT_CFL) -> float:
    """Largest admissible explicit step for given transport coefficients.

    dt <= safety * min(dx^2 / (2 d kappa_max), cfl * dx / |u|_max); the
    advective bound is skipped for a quiescent run.
    """
    if kappa_max <= 0.0:
        raise ValueError(f"kappa_max must be positive (got {kappa_max})")
    limits = [dx * dx / (2.0 * dimension * kappa_max)]
    if u_max > 0.0:
        limits.append(cfl * dx / u_max)
    return safety * min(limits)
