"""Fused 3D stepping kernels (numba) for the closed adiabatic box.

The 3D case is quiescent (no flow solver), with an isotropic interface:
a D3Q7 phase-field update plus diffusion-only scalar transport in a
zero-flux box. Same determinism contract as the 2D kernels: pure
per-cell gathers.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

FLUID, WALL = 0, 1

CX3 = np.array([0, 1, -1, 0, 0, 0, 0], dtype=np.int64)
CY3 = np.array([0, 0, 0, 1, -1, 0, 0], dtype=np.int64)
CZ3 = np.array([0, 0, 0, 0, 0, 1, -1], dtype=np.int64)
W3 = np.array([0.25] + [0.125] * 6)

GRAD_FLOOR2 = 1.0e-16


@njit(parallel=True, cache=True)
def phase3d_prepare(phi, U, theta, mask, inv_tau0, lam, compensate, w0lat2, qsrc):
    """Driving-force source per cell; optional curvature compensation."""
    nx, ny, nz = mask.shape
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                if mask[i, j, k] != FLUID:
                    qsrc[i, j, k] = 0.0
                    continue
                p = phi[i, j, k]
                om = 1.0 - p * p
                # solid-interior cells hold the consumed-solute bookkeeping
                # (strongly negative U); the attachment driving force is
                # floored at complete depletion of the actual liquid
                ud = U[i, j, k]
                if ud < -1.0:
                    ud = -1.0
                elif ud > 1.0:
                    ud = 1.0
                q = (p - p * p * p) + lam * (ud + theta[i, j, k]) * om * om
                if compensate == 1:
                    ip = i + 1 if i + 1 < nx else 0
                    im = i - 1 if i - 1 >= 0 else nx - 1
                    jp = j + 1 if j + 1 < ny else 0
                    jm = j - 1 if j - 1 >= 0 else ny - 1
                    kp = k + 1 if k + 1 < nz else 0
                    km = k - 1 if k - 1 >= 0 else nz - 1
                    gx = 0.5 * (phi[ip, j, k] - phi[im, j, k])
                    gy = 0.5 * (phi[i, jp, k] - phi[i, jm, k])
                    gz = 0.5 * (phi[i, j, kp] - phi[i, j, km])
                    g2 = gx * gx + gy * gy + gz * gz
                    if g2 > GRAD_FLOOR2:
                        pxx = phi[ip, j, k] - 2.0 * p + phi[im, j, k]
                        pyy = phi[i, jp, k] - 2.0 * p + phi[i, jm, k]
                        pzz = phi[i, j, kp] - 2.0 * p + phi[i, j, km]
                        pxy = 0.25 * (phi[ip, jp, k] - phi[ip, jm, k]
                                      - phi[im, jp, k] + phi[im, jm, k])
                        pxz = 0.25 * (phi[ip, j, kp] - phi[ip, j, km]
                                      - phi[im, j, kp] + phi[im, j, km])
                        pyz = 0.25 * (phi[i, jp, kp] - phi[i, jp, km]
                                      - phi[i, jm, kp] + phi[i, jm, km])
                        phinn = (gx * gx * pxx + gy * gy * pyy + gz * gz * pzz
                                 + 2.0 * (gx * gy * pxy + gx * gz * pxz
                                          + gy * gz * pyz)) / g2
                        q -= w0lat2 * (pxx + pyy + pzz - phinn)
                qsrc[i, j, k] = q * inv_tau0


@njit(parallel=True, cache=True)
def phase3d_stream(h, h_new, phi, qsrc, mask, inv_eta, phi_new, dphi):
    """Isotropic D3Q7 gather update (a = 1)."""
    nx, ny, nz = mask.shape
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                if mask[i, j, k] != FLUID:
                    for a in range(7):
                        h_new[a, i, j, k] = -W3[a]
                    phi_new[i, j, k] = -1.0
                    dphi[i, j, k] = 0.0
                    continue
                total = 0.0
                for a in range(7):
                    si = (i - CX3[a] + nx) % nx
                    sj = (j - CY3[a] + ny) % ny
                    sk = (k - CZ3[a] + nz) % nz
                    if mask[si, sj, sk] == FLUID:
                        hsrc = h[a, si, sj, sk]
                        heq = W3[a] * phi[si, sj, sk]
                        val = (hsrc - (hsrc - heq) * inv_eta
                               + W3[a] * qsrc[si, sj, sk])
                    else:
                        val = -W3[a]
                    h_new[a, i, j, k] = val
                    total += val
                phi_new[i, j, k] = total
                dphi[i, j, k] = total - phi[i, j, k]


@njit(inline="always")
def _mobU(p, dU):
    w = 0.5 * (1.0 - p)
    if w < 0.0:
        w = 0.0
    return dU * w


@njit(inline="always")
def _capT(p, capL, capS):
    return 0.5 * ((1.0 - p) * capL + (1.0 + p) * capS)


@njit(inline="always")
def _condT(p, capL, capS, kapL, kapS):
    return _capT(p, capL, capS) * 0.5 * ((1.0 - p) * kapL + (1.0 + p) * kapS)


@njit(inline="always")
def _flux3(s0, s1, s2, s3, k0, k1, k2, k3, m0, m1, m2, m3):
    """Zero-flux-walls diffusive face flux between cells 1 and 2."""
    if m1 == FLUID and m2 == FLUID:
        if m0 == FLUID and m3 == FLUID:
            kface = (-k0 + 9.0 * k1 + 9.0 * k2 - k3) / 16.0
            if kface < 0.0:
                kface = 0.0
            return kface * (s0 - 15.0 * s1 + 15.0 * s2 - s3) / 12.0
        return 0.5 * (k1 + k2) * (s2 - s1)
    return 0.0


@njit(parallel=True, cache=True)
def scalar3d_step(U, T, U_new, T_new, phi, dphi, mask,
                  dU_lat, kapL_lat, kapS_lat, capL, capS,
                  uptake, heatK, calib):
    """Diffusion-only update of U and T in the closed box."""
    nx, ny, nz = mask.shape
    dU = dU_lat * calib
    for i in prange(nx):
        for j in range(ny):
            for k in range(nz):
                if mask[i, j, k] != FLUID:
                    U_new[i, j, k] = U[i, j, k]
                    T_new[i, j, k] = T[i, j, k]
                    continue
                im2 = (i - 2 + nx) % nx
                im1 = (i - 1 + nx) % nx
                ip1 = (i + 1) % nx
                ip2 = (i + 2) % nx
                jm2 = (j - 2 + ny) % ny
                jm1 = (j - 1 + ny) % ny
                jp1 = (j + 1) % ny
                jp2 = (j + 2) % ny
                km2 = (k - 2 + nz) % nz
                km1 = (k - 1 + nz) % nz
                kp1 = (k + 1) % nz
                kp2 = (k + 2) % nz

                divU = 0.0
                divT = 0.0

                # x axis
                p0 = phi[im1, j, k]; p1 = phi[i, j, k]; p2 = phi[ip1, j, k]; p3 = phi[ip2, j, k]
                m0 = mask[im1, j, k]; m1 = mask[i, j, k]; m2 = mask[ip1, j, k]; m3 = mask[ip2, j, k]
                divU += _flux3(U[im1, j, k], U[i, j, k], U[ip1, j, k], U[ip2, j, k],
                               _mobU(p0, dU), _mobU(p1, dU), _mobU(p2, dU), _mobU(p3, dU),
                               m0, m1, m2, m3)
                divT += _flux3(T[im1, j, k], T[i, j, k], T[ip1, j, k], T[ip2, j, k],
                               _condT(p0, capL, capS, kapL_lat, kapS_lat),
                               _condT(p1, capL, capS, kapL_lat, kapS_lat),
                               _condT(p2, capL, capS, kapL_lat, kapS_lat),
                               _condT(p3, capL, capS, kapL_lat, kapS_lat),
                               m0, m1, m2, m3)
                p0 = phi[im2, j, k]; p1 = phi[im1, j, k]; p2 = phi[i, j, k]; p3 = phi[ip1, j, k]
                m0 = mask[im2, j, k]; m1 = mask[im1, j, k]; m2 = mask[i, j, k]; m3 = mask[ip1, j, k]
                divU -= _flux3(U[im2, j, k], U[im1, j, k], U[i, j, k], U[ip1, j, k],
                               _mobU(p0, dU), _mobU(p1, dU), _mobU(p2, dU), _mobU(p3, dU),
                               m0, m1, m2, m3)
                divT -= _flux3(T[im2, j, k], T[im1, j, k], T[i, j, k], T[ip1, j, k],
                               _condT(p0, capL, capS, kapL_lat, kapS_lat),
                               _condT(p1, capL, capS, kapL_lat, kapS_lat),
                               _condT(p2, capL, capS, kapL_lat, kapS_lat),
                               _condT(p3, capL, capS, kapL_lat, kapS_lat),
                               m0, m1, m2, m3)

                # y axis
                p0 = phi[i, jm1, k]; p1 = phi[i, j, k]; p2 = phi[i, jp1, k]; p3 = phi[i, jp2, k]
                m0 = mask[i, jm1, k]; m1 = mask[i, j, k]; m2 = mask[i, jp1, k]; m3 = mask[i, jp2, k]
                divU += _flux3(U[i, jm1, k], U[i, j, k], U[i, jp1, k], U[i, jp2, k],
                               _mobU(p0, dU), _mobU(p1, dU), _mobU(p2, dU), _mobU(p3, dU),
                               m0, m1, m2, m3)
                divT += _flux3(T[i, jm1, k], T[i, j, k], T[i, jp1, k], T[i, jp2, k],
                               _condT(p0, capL, capS, kapL_lat, kapS_lat),
                               _condT(p1, capL, capS, kapL_lat, kapS_lat),
                               _condT(p2, capL, capS, kapL_lat, kapS_lat),
                               _condT(p3, capL, capS, kapL_lat, kapS_lat),
                               m0, m1, m2, m3)
                p0 = phi[i, jm2, k]; p1 = phi[i, jm1, k]; p2 = phi[i, j, k]; p3 = phi[i, jp1, k]
                m0 = mask[i, jm2, k]; m1 = mask[i, jm1, k]; m2 = mask[i, j, k]; m3 = mask[i, jp1, k]
                divU -= _flux3(U[i, jm2, k], U[i, jm1, k], U[i, j, k], U[i, jp1, k],
                               _mobU(p0, dU), _mobU(p1, dU), _mobU(p2, dU), _mobU(p3, dU),
                               m0, m1, m2, m3)
                divT -= _flux3(T[i, jm2, k], T[i, jm1, k], T[i, j, k], T[i, jp1, k],
                               _condT(p0, capL, capS, kapL_lat, kapS_lat),
                               _condT(p1, capL, capS, kapL_lat, kapS_lat),
                               _condT(p2, capL, capS, kapL_lat, kapS_lat),
                               _condT(p3, capL, capS, kapL_lat, kapS_lat),
                               m0, m1, m2, m3)

                # z axis
                p0 = phi[i, j, km1]; p1 = phi[i, j, k]; p2 = phi[i, j, kp1]; p3 = phi[i, j, kp2]
                m0 = mask[i, j, km1]; m1 = mask[i, j, k]; m2 = mask[i, j, kp1]; m3 = mask[i, j, kp2]
                divU += _flux3(U[i, j, km1], U[i, j, k], U[i, j, kp1], U[i, j, kp2],
                               _mobU(p0, dU), _mobU(p1, dU), _mobU(p2, dU), _mobU(p3, dU),
                               m0, m1, m2, m3)
                divT += _flux3(T[i, j, km1], T[i, j, k], T[i, j, kp1], T[i, j, kp2],
                               _condT(p0, capL, capS, kapL_lat, kapS_lat),
                               _condT(p1, capL, capS, kapL_lat, kapS_lat),
                               _condT(p2, capL, capS, kapL_lat, kapS_lat),
                               _condT(p3, capL, capS, kapL_lat, kapS_lat),
                               m0, m1, m2, m3)
                p0 = phi[i, j, km2]; p1 = phi[i, j, km1]; p2 = phi[i, j, k]; p3 = phi[i, j, kp1]
                m0 = mask[i, j, km2]; m1 = mask[i, j, km1]; m2 = mask[i, j, k]; m3 = mask[i, j, kp1]
                divU -= _flux3(U[i, j, km2], U[i, j, km1], U[i, j, k], U[i, j, kp1],
                               _mobU(p0, dU), _mobU(p1, dU), _mobU(p2, dU), _mobU(p3, dU),
                               m0, m1, m2, m3)
                divT -= _flux3(T[i, j, km2], T[i, j, km1], T[i, j, k], T[i, j, kp1],
                               _condT(p0, capL, capS, kapL_lat, kapS_lat),
                               _condT(p1, capL, capS, kapL_lat, kapS_lat),
                               _condT(p2, capL, capS, kapL_lat, kapS_lat),
                               _condT(p3, capL, capS, kapL_lat, kapS_lat),
                               m0, m1, m2, m3)

                p = phi[i, j, k]
                capc = _capT(p, capL, capS)
                dp = dphi[i, j, k]
                U_new[i, j, k] = U[i, j, k] + divU - 0.5 * uptake * dp
                T_new[i, j, k] = T[i, j, k] + divT / capc + 0.5 * (heatK / capc) * dp
