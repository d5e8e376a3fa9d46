"""D2Q9 BGK lattice-Boltzmann solver for the cell flow field.

The crystal acts on the liquid through a diffuse friction force that
penalizes velocity inside the solid; the masked velocity
u* = (1 - phi)/2 * u is what enters the equilibrium populations and the
scalar advection. Forcing uses the half-step-corrected (second-order)
scheme so the measured viscosity stays nu = cs^2 (tau - dt/2).

The periodic ``collide_stream`` below is the reference implementation
used by the verification tests; the production kernel with walls,
inlets and outlets lives in ``_kernels2d``.
"""

from __future__ import annotations

import numpy as np

from .fields import require_finite
from .lattice import LatticeSpec
from .materials import FRICTION_H


def equilibrium(rho, ux, uy, lattice: LatticeSpec) -> np.ndarray:
    """Second-order Hermite equilibrium populations."""
    rho = np.asarray(rho, dtype=float)
    ux = np.asarray(ux, dtype=float)
    uy = np.asarray(uy, dtype=float)
    inv_cs2 = 1.0 / lattice.cs2
    u2 = (ux * ux + uy * uy) * inv_cs2
    feq = np.empty((lattice.q, *rho.shape), dtype=float)
    for alpha in range(lattice.q):
        cx, cy = lattice.velocities[alpha]
        cu = (cx * ux + cy * uy) * inv_cs2
        feq[alpha] = lattice.weights[alpha] * rho * (1.0 + cu + 0.5 * cu * cu - 0.5 * u2)
    return feq


def friction_coefficient(phi, nu: float, interface_width: float):
    """Friction rate h nu (1+phi)^2 (1-phi) / (4 W0^2), clamped to >= 0."""
    one_plus = 1.0 + phi
    k = FRICTION_H * nu * one_plus * one_plus * (1.0 - phi) / (4.0 * interface_width ** 2)
    return np.maximum(k, 0.0)


def friction_force(phi, ux, uy, eta_f: float, interface_width: float):
    """Drag force density exerted by the solid on the liquid."""
    k = friction_coefficient(phi, eta_f, interface_width)
    return -k * ux, -k * uy


def relaxation_from_viscosity(nu: float, cs2: float = 1.0 / 3.0, dt: float = 1.0) -> float:
    """BGK relaxation time tau = nu / cs^2 + dt/2."""
    if nu < 0:
        raise ValueError(f"viscosity must be non-negative (got {nu})")
    return nu / cs2 + 0.5 * dt


def viscosity_from_relaxation(tau: float, cs2: float = 1.0 / 3.0, dt: float = 1.0) -> float:
    return cs2 * (tau - 0.5 * dt)


def mask_velocity(ux, uy, phi):
    """Velocity felt by transported scalars: u* = (1 - phi)/2 * u."""
    weight = np.clip((1.0 - np.asarray(phi)) * 0.5, 0.0, 1.0)
    return weight * ux, weight * uy


def moments(f: np.ndarray, lattice: LatticeSpec):
    """Density and raw momentum of the populations."""
    rho = f.sum(axis=0)
    mx = np.tensordot(lattice.velocities[:, 0].astype(float), f, axes=(0, 0))
    my = np.tensordot(lattice.velocities[:, 1].astype(float), f, axes=(0, 0))
    return rho, mx, my


def collide_stream(f: np.ndarray, tau: float, lattice: LatticeSpec,
                   phi: np.ndarray | None = None, nu: float | None = None,
                   interface_width: float = 1.0,
                   body_force: tuple[float, float] = (0.0, 0.0)):
    """One periodic BGK step with friction and body forcing.

    Returns (f_new, rho, ux, uy, usx, usy). The velocity carries the
    half-force correction; with a linear drag the correction is solved
    implicitly, so the drag never overshoots. The equilibrium is built
    from the masked velocity u*.
    """
    rho, mx, my = moments(f, lattice)
    if np.any(rho <= 0.0):
        raise FloatingPointError("non-positive density in flow step")
    fx = np.full_like(rho, body_force[0])
    fy = np.full_like(rho, body_force[1])
    if phi is not None:
        k = friction_coefficient(phi, nu, interface_width)
        denom = 1.0 + 0.5 * k
        ux = (mx / rho + 0.5 * fx / rho) / denom
        uy = (my / rho + 0.5 * fy / rho) / denom
        fx = fx - rho * k * ux
        fy = fy - rho * k * uy
        wsolid = np.clip((1.0 - phi) * 0.5, 0.0, 1.0)
    else:
        ux = mx / rho + 0.5 * fx / rho
        uy = my / rho + 0.5 * fy / rho
        wsolid = 1.0
    usx = wsolid * ux
    usy = wsolid * uy

    feq = equilibrium(rho, usx, usy, lattice)
    inv_cs2 = 1.0 / lattice.cs2
    guo_pref = 1.0 - 0.5 / tau
    f_new = np.empty_like(f)
    for alpha in range(lattice.q):
        cx, cy = lattice.velocities[alpha]
        cu = cx * usx + cy * usy
        src = lattice.weights[alpha] * guo_pref * (
            ((cx - usx) * fx + (cy - usy) * fy) * inv_cs2
            + cu * (cx * fx + cy * fy) * inv_cs2 * inv_cs2
        )
        post = f[alpha] + (feq[alpha] - f[alpha]) / tau + src
        f_new[alpha] = np.roll(post, (lattice.velocities[alpha][0],
                               lattice.velocities[alpha][1]), axis=(0, 1))
    require_finite(f_new, "flow populations")
    return f_new, rho, ux, uy, usx, usy
