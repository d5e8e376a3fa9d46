"""Anisotropic phase-field dynamics solved with a modified LBM scheme.

The order parameter is +1 in the crystal and -1 in the liquid with a
tanh transition of width set by ``interface_width``. Six-fold surface
anisotropy enters through the orientation function a(n) and its
derivative with respect to the order-parameter gradient, which feeds
the equilibrium populations.

These are the reference (numpy) implementations; the fused stepping
kernels used by the simulation driver live in ``_kernels2d``/``_kernels3d``
and are validated against these.
"""

from __future__ import annotations

import numpy as np

from .lattice import LatticeSpec

GRADIENT_FLOOR = 1.0e-8


def interface_normal(gx, gy, floor: float = GRADIENT_FLOOR):
    """Unit normal (solid -> liquid) from the order-parameter gradient.

    Cells whose gradient magnitude is below the floor are flagged with a
    zero normal; they carry no orientation information.
    """
    mag = np.sqrt(gx * gx + gy * gy)
    ok = mag > floor
    inv = np.where(ok, 1.0 / np.where(ok, mag, 1.0), 0.0)
    return -gx * inv, -gy * inv, ok


def anisotropy(nx, ny, strength: float):
    """Six-fold surface anisotropy 1 + eps * cos(6 angle(n))."""
    angle = np.arctan2(ny, nx)
    return 1.0 + strength * np.cos(6.0 * angle)


def anisotropy_gradient_term(gx, gy, strength: float,
                             floor: float = GRADIENT_FLOOR):
    """|grad phi|^2 * d(a^2)/d(grad phi), in closed form.

    With a = 1 + eps cos(6 t), t = atan2(gy, gx), the chain rule gives
    |g|^2 da^2/dg = 12 eps a sin(6 t) * (gy, -gx). The result is exactly
    zero in the isotropic limit and below the gradient floor.
    """
    gx = np.asarray(gx, dtype=float)
    gy = np.asarray(gy, dtype=float)
    mag2 = gx * gx + gy * gy
    ok = mag2 > floor * floor
    theta = np.arctan2(gy, gx)
    a = 1.0 + strength * np.cos(6.0 * theta)
    pref = np.where(ok, 12.0 * strength * a * np.sin(6.0 * theta), 0.0)
    return pref * gy, -pref * gx


def phase_source(phi, U, theta, coupling: float):
    """Bulk driving force (phi - phi^3) + lambda (U + theta)(1 - phi^2)^2."""
    one_minus = 1.0 - phi * phi
    return (phi - phi**3) + coupling * (U + theta) * one_minus * one_minus


def phase_equilibrium(phi, grad_term_x, grad_term_y, lattice: LatticeSpec,
                      w2_over_tau0: float) -> np.ndarray:
    """Equilibrium populations of the phase-field scheme (lattice units).

    The vector part carries the anisotropy forcing; its first moment is
    -(W0^2/tau0) * |grad phi|^2 da^2/dgrad phi and its zeroth moment
    cancels, so the populations always sum back to phi.
    """
    phi = np.asarray(phi, dtype=float)
    vx = w2_over_tau0 * np.asarray(grad_term_x, dtype=float)
    vy = w2_over_tau0 * np.asarray(grad_term_y, dtype=float)
    heq = np.empty((lattice.q, *phi.shape), dtype=float)
    inv_cs2 = 1.0 / lattice.cs2
    for alpha in range(lattice.q):
        cx, cy = lattice.velocities[alpha][:2]
        heq[alpha] = lattice.weights[alpha] * (phi - inv_cs2 * (cx * vx + cy * vy))
    return heq


def phase_relaxation(a_s, w2_over_tau0: float, lattice: LatticeSpec,
                     dt: float = 1.0):
    """Relaxation parameter eta = a^2 W0^2 / (cs^2 tau0) + dt/2."""
    return (np.asarray(a_s) ** 2) * w2_over_tau0 / lattice.cs2 + 0.5 * dt


def curvature_term(phi: np.ndarray, floor: float = GRADIENT_FLOOR) -> np.ndarray:
    """kappa * |grad phi| = lap(phi) - n.H(phi).n on a periodic 2D grid.

    Used by the optional curvature-compensated source that removes
    motion by mean curvature (and with it the diffuse-interface
    Gibbs-Thomson shift) in the spherical verification scenario.
    """
    px = (np.roll(phi, -1, 0) - np.roll(phi, 1, 0)) * 0.5
    py = (np.roll(phi, -1, 1) - np.roll(phi, 1, 1)) * 0.5
    pxx = np.roll(phi, -1, 0) - 2.0 * phi + np.roll(phi, 1, 0)
    pyy = np.roll(phi, -1, 1) - 2.0 * phi + np.roll(phi, 1, 1)
    pxy = (np.roll(np.roll(phi, -1, 0), -1, 1) - np.roll(np.roll(phi, -1, 0), 1, 1)
           - np.roll(np.roll(phi, 1, 0), -1, 1) + np.roll(np.roll(phi, 1, 0), 1, 1)) * 0.25
    g2 = px * px + py * py
    lap = pxx + pyy
    ok = g2 > floor * floor
    phinn = np.where(ok, (px * px * pxx + 2.0 * px * py * pxy + py * py * pyy)
                     / np.where(ok, g2, 1.0), 0.0)
    return np.where(ok, lap - phinn, 0.0)
