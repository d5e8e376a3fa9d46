"""Fused 2D stepping kernels (numba).

All kernels are cell-parallel gathers: each loop iteration writes only
its own cell of the output buffers, so results are bit-identical for
any thread count. Reductions happen outside, in numpy.

Mask codes: 0 fluid, 1 wall, 2 inlet, 3 outlet. Boundary cells carry
pinned field values (phi = -1, prescribed scalars) that the update
kernels read like any other neighbor.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

FLUID, WALL, INLET, OUTLET = 0, 1, 2, 3

CX = np.array([0, 1, 0, -1, 0, 1, -1, -1, 1], dtype=np.int64)
CY = np.array([0, 0, 1, 0, -1, 1, 1, -1, -1], dtype=np.int64)
W = np.array([4.0 / 9.0] + [1.0 / 9.0] * 4 + [1.0 / 36.0] * 4)
OPP = np.array([0, 3, 4, 1, 2, 7, 8, 5, 6], dtype=np.int64)

FRICTION_H = 2.757
WENO_EPS = 1.0e-6
GRAD_FLOOR2 = 1.0e-16


# --------------------------------------------------------------------------
# flow: D2Q9 BGK with diffuse-solid friction, Guo forcing, bounce-back
# --------------------------------------------------------------------------

@njit(parallel=True, cache=True)
def flow_macros(f, phi, mask, nu_lat, inv4w2, gx, gy,
                rho, ux, uy, usx, usy, fx, fy):
    """Moments, implicit friction-corrected velocity, masked velocity, force."""
    nx, ny = mask.shape
    for i in prange(nx):
        for j in range(ny):
            if mask[i, j] != FLUID:
                rho[i, j] = 1.0
                ux[i, j] = 0.0
                uy[i, j] = 0.0
                usx[i, j] = 0.0
                usy[i, j] = 0.0
                fx[i, j] = 0.0
                fy[i, j] = 0.0
                continue
            r = 0.0
            mx = 0.0
            my = 0.0
            for a in range(9):
                fa = f[a, i, j]
                r += fa
                mx += CX[a] * fa
                my += CY[a] * fa
            p = phi[i, j]
            op = 1.0 + p
            k = FRICTION_H * nu_lat * op * op * (1.0 - p) * inv4w2
            if k < 0.0:
                k = 0.0
            # half-force correction solved implicitly for the linear drag
            u = (mx / r + 0.5 * gx / r) / (1.0 + 0.5 * k)
            v = (my / r + 0.5 * gy / r) / (1.0 + 0.5 * k)
            rho[i, j] = r
            ux[i, j] = u
            uy[i, j] = v
            fx[i, j] = gx - r * k * u
            fy[i, j] = gy - r * k * v
            wmask = (1.0 - p) * 0.5
            if wmask < 0.0:
                wmask = 0.0
            elif wmask > 1.0:
                wmask = 1.0
            usx[i, j] = wmask * u
            usy[i, j] = wmask * v


@njit(parallel=True, cache=True)
def flow_collide(f, post, rho, usx, usy, fx, fy, mask, tau):
    nx, ny = mask.shape
    pref = 1.0 - 0.5 / tau
    inv_tau = 1.0 / tau
    for i in prange(nx):
        for j in range(ny):
            if mask[i, j] != FLUID:
                for a in range(9):
                    post[a, i, j] = W[a]
                continue
            r = rho[i, j]
            u = usx[i, j]
            v = usy[i, j]
            Fx = fx[i, j]
            Fy = fy[i, j]
            u2 = 1.5 * (u * u + v * v)
            for a in range(9):
                cu = CX[a] * u + CY[a] * v
                feq = W[a] * r * (1.0 + 3.0 * cu + 4.5 * cu * cu - u2)
                guo = W[a] * pref * (3.0 * ((CX[a] - u) * Fx + (CY[a] - v) * Fy)
                                     + 9.0 * cu * (CX[a] * Fx + CY[a] * Fy))
                post[a, i, j] = f[a, i, j] + (feq - f[a, i, j]) * inv_tau + guo


@njit(parallel=True, cache=True)
def flow_stream(post, f_new, mask, uin_x, uin_y, rho, usx, usy):
    """Gather streaming with halfway bounce-back walls and open ends.

    Inlet cells reflect with a momentum correction for the prescribed
    velocity. Outlet links carry the local non-equilibrium plus an
    equilibrium re-anchored at the reference density, which keeps the
    outflow gradient-free in velocity while pinning the pressure (a
    plain population copy lets mass pile up without bound).
    """
    nx, ny = mask.shape
    for i in prange(nx):
        for j in range(ny):
            if mask[i, j] != FLUID:
                for a in range(9):
                    f_new[a, i, j] = W[a]
                continue
            for a in range(9):
                si = (i - CX[a] + nx) % nx
                sj = (j - CY[a] + ny) % ny
                m = mask[si, sj]
                if m == FLUID:
                    f_new[a, i, j] = post[a, si, sj]
                elif m == WALL:
                    f_new[a, i, j] = post[OPP[a], i, j]
                elif m == INLET:
                    cu = CX[a] * uin_x + CY[a] * uin_y
                    f_new[a, i, j] = post[OPP[a], i, j] + 6.0 * W[a] * cu
                else:  # OUTLET
                    u = usx[i, j]
                    v = usy[i, j]
                    cu = CX[a] * u + CY[a] * v
                    u2 = 1.5 * (u * u + v * v)
                    poly = 1.0 + 3.0 * cu + 4.5 * cu * cu - u2
                    feq_ref = W[a] * poly
                    feq_loc = W[a] * rho[i, j] * poly
                    f_new[a, i, j] = feq_ref + (post[a, i, j] - feq_loc)


# --------------------------------------------------------------------------
# phase field: modified stream-collide with orientation-dependent weights
# --------------------------------------------------------------------------

@njit(parallel=True, cache=True)
def phase_prepare(phi, U, theta, mask, eps_s, w2tau, inv_tau0, lam,
                  compensate, w0lat2, a2, vx, vy, inv_eta, qsrc):
    """Per-cell anisotropy, equilibrium forcing vector, relaxation, source."""
    nx, ny = mask.shape
    for i in prange(nx):
        for j in range(ny):
            if mask[i, j] != FLUID:
                a2[i, j] = 1.0
                vx[i, j] = 0.0
                vy[i, j] = 0.0
                inv_eta[i, j] = 0.0
                qsrc[i, j] = 0.0
                continue
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i - 1 >= 0 else nx - 1
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j - 1 >= 0 else ny - 1
            gxv = 0.5 * (phi[ip, j] - phi[im, j])
            gyv = 0.5 * (phi[i, jp] - phi[i, jm])
            g2 = gxv * gxv + gyv * gyv
            if g2 > GRAD_FLOOR2 and eps_s != 0.0:
                th = np.arctan2(gyv, gxv)
                c6 = np.cos(6.0 * th)
                s6 = np.sin(6.0 * th)
                a = 1.0 + eps_s * c6
                gpref = 12.0 * eps_s * a * s6
                a2v = a * a
                vx[i, j] = w2tau * gpref * gyv
                vy[i, j] = -w2tau * gpref * gxv
            else:
                a2v = 1.0
                vx[i, j] = 0.0
                vy[i, j] = 0.0
            a2[i, j] = a2v
            inv_eta[i, j] = 1.0 / (3.0 * a2v * w2tau + 0.5)
            p = phi[i, j]
            om = 1.0 - p * p
            # the solid interior carries consumed-solute bookkeeping (deeply
            # negative U); the attachment force is floored at full depletion
            # and capped symmetrically so startup transients cannot blow
            # the well potential apart
            ud = U[i, j]
            if ud < -1.0:
                ud = -1.0
            elif ud > 1.0:
                ud = 1.0
            q = (p - p * p * p) + lam * (ud + theta[i, j]) * om * om
            if compensate == 1:
                pxx = phi[ip, j] - 2.0 * p + phi[im, j]
                pyy = phi[i, jp] - 2.0 * p + phi[i, jm]
                if g2 > GRAD_FLOOR2:
                    pxy = 0.25 * (phi[ip, jp] - phi[ip, jm] - phi[im, jp] + phi[im, jm])
                    phinn = (gxv * gxv * pxx + 2.0 * gxv * gyv * pxy
                             + gyv * gyv * pyy) / g2
                    q -= w0lat2 * (pxx + pyy - phinn)
            qsrc[i, j] = q * inv_tau0


@njit(parallel=True, cache=True)
def phase_stream(h, h_new, phi, a2, vx, vy, inv_eta, qsrc, mask,
                 phi_new, dphi):
    """Gather update of the phase populations.

    The post-streaming value is divided by the destination's a^2 and the
    correction term uses the destination's pre-step population, read
    from the current buffer.
    """
    nx, ny = mask.shape
    for i in prange(nx):
        for j in range(ny):
            if mask[i, j] != FLUID:
                for a in range(9):
                    h_new[a, i, j] = -W[a]
                phi_new[i, j] = -1.0
                dphi[i, j] = 0.0
                continue
            inv_a2 = 1.0 / a2[i, j]
            one_minus_a2 = 1.0 - a2[i, j]
            total = 0.0
            for a in range(9):
                si = (i - CX[a] + nx) % nx
                sj = (j - CY[a] + ny) % ny
                if mask[si, sj] == FLUID:
                    hsrc = h[a, si, sj]
                    heq = W[a] * (phi[si, sj]
                                  - 3.0 * (CX[a] * vx[si, sj] + CY[a] * vy[si, sj]))
                    val = (hsrc - one_minus_a2 * h[a, i, j]
                           - (hsrc - heq) * inv_eta[si, sj]
                           + W[a] * qsrc[si, sj]) * inv_a2
                else:
                    hsrc = -W[a]  # boundary cells sit at phi = -1 equilibrium
                    val = (hsrc - one_minus_a2 * h[a, i, j]) * inv_a2
                h_new[a, i, j] = val
                total += val
            phi_new[i, j] = total
            dphi[i, j] = total - phi[i, j]


# --------------------------------------------------------------------------
# scalars: WENO3 advection + fourth-order conservative diffusion
# --------------------------------------------------------------------------

@njit(inline="always")
def _weno_deriv(sm2, sm1, s0, sp1, sp2, upwind_positive):
    if upwind_positive:
        d0 = 0.5 * (sm2 - 4.0 * sm1 + 3.0 * s0)
        b0 = (sm2 - 2.0 * sm1 + s0) ** 2
    else:
        d0 = 0.5 * (-3.0 * s0 + 4.0 * sp1 - sp2)
        b0 = (s0 - 2.0 * sp1 + sp2) ** 2
    d1 = 0.5 * (sp1 - sm1)
    b1 = (sm1 - 2.0 * s0 + sp1) ** 2
    a0 = (1.0 / 3.0) / ((WENO_EPS + b0) * (WENO_EPS + b0))
    a1 = (2.0 / 3.0) / ((WENO_EPS + b1) * (WENO_EPS + b1))
    return (a0 * d0 + a1 * d1) / (a0 + a1)


@njit(inline="always")
def _diff_flux(s_m1, s_0, s_p1, s_p2, k_m1, k_0, k_p1, k_p2,
               m_m1, m_0, m_p1, m_p2, dirichlet_bc, bc_value):
    """Diffusive flux through the face between cells 0 and +1.

    Falls back from the fourth-order stencil to a two-point flux when
    the wide stencil leaves the fluid; boundary faces apply a Dirichlet
    two-point flux or vanish (zero-flux / outlet).
    """
    if m_0 == FLUID and m_p1 == FLUID:
        if m_m1 == FLUID and m_p2 == FLUID:
            kface = (-k_m1 + 9.0 * k_0 + 9.0 * k_p1 - k_p2) / 16.0
            if kface < 0.0:
                kface = 0.0
            return kface * (s_m1 - 15.0 * s_0 + 15.0 * s_p1 - s_p2) / 12.0
        return 0.5 * (k_0 + k_p1) * (s_p1 - s_0)
    if m_0 == FLUID:
        if m_p1 == INLET or (m_p1 == WALL and dirichlet_bc == 1):
            return k_0 * (bc_value - s_0)
        return 0.0
    if m_p1 == FLUID:
        if m_0 == INLET or (m_0 == WALL and dirichlet_bc == 1):
            return k_p1 * (s_p1 - bc_value)
        return 0.0
    return 0.0


@njit(parallel=True, cache=True)
def scalar_step(U, T, U_new, T_new, phi, dphi, usx, usy, mask,
                dU_lat, kapL_lat, kapS_lat, capL, capS,
                uptake, heatK, t_dirichlet, t_wall, u_inlet_value,
                calib):
    """One explicit update of supersaturation and temperature.

    ``dphi`` is the per-step change of phi from the phase solver; the
    solute sink and latent-heat source are proportional to it. ``calib``
    scales the solute diffusivity (temperature-dependent transport
    calibration); the one-sided mobility (1-phi)/2 shuts diffusion off
    in the solid. Temperature walls are Dirichlet (t_dirichlet = 1) or
    adiabatic.
    """
    nx, ny = mask.shape
    for i in prange(nx):
        for j in range(ny):
            if mask[i, j] != FLUID:
                U_new[i, j] = U[i, j]
                T_new[i, j] = T[i, j]
                continue

            im2 = (i - 2 + nx) % nx
            im1 = (i - 1 + nx) % nx
            ip1 = (i + 1) % nx
            ip2 = (i + 2) % nx
            jm2 = (j - 2 + ny) % ny
            jm1 = (j - 1 + ny) % ny
            jp1 = (j + 1) % ny
            jp2 = (j + 2) % ny

            # advection (masked velocity is ~0 deep in the solid and at walls)
            ux = usx[i, j]
            uy = usy[i, j]
            advU = 0.0
            advT = 0.0
            if ux != 0.0:
                up = ux > 0.0
                advU += ux * _weno_deriv(U[im2, j], U[im1, j], U[i, j],
                                         U[ip1, j], U[ip2, j], up)
                advT += ux * _weno_deriv(T[im2, j], T[im1, j], T[i, j],
                                         T[ip1, j], T[ip2, j], up)
            if uy != 0.0:
                up = uy > 0.0
                advU += uy * _weno_deriv(U[i, jm2], U[i, jm1], U[i, j],
                                         U[i, jp1], U[i, jp2], up)
                advT += uy * _weno_deriv(T[i, jm2], T[i, jm1], T[i, j],
                                         T[i, jp1], T[i, jp2], up)

            # solute diffusion with one-sided mobility
            divU = 0.0
            divT = 0.0
            # coefficient helper values at the 5-cell cross
            for axis in range(2):
                for side in range(2):
                    if axis == 0:
                        if side == 0:  # face (i, i+1)
                            a_, b_, c_, d_ = im1, i, ip1, ip2
                            sU0, sU1, sU2, sU3 = U[a_, j], U[b_, j], U[c_, j], U[d_, j]
                            sT0, sT1, sT2, sT3 = T[a_, j], T[b_, j], T[c_, j], T[d_, j]
                            p0, p1, p2, p3 = phi[a_, j], phi[b_, j], phi[c_, j], phi[d_, j]
                            m0, m1, m2, m3 = mask[a_, j], mask[b_, j], mask[c_, j], mask[d_, j]
                        else:  # face (i-1, i)
                            a_, b_, c_, d_ = im2, im1, i, ip1
                            sU0, sU1, sU2, sU3 = U[a_, j], U[b_, j], U[c_, j], U[d_, j]
                            sT0, sT1, sT2, sT3 = T[a_, j], T[b_, j], T[c_, j], T[d_, j]
                            p0, p1, p2, p3 = phi[a_, j], phi[b_, j], phi[c_, j], phi[d_, j]
                            m0, m1, m2, m3 = mask[a_, j], mask[b_, j], mask[c_, j], mask[d_, j]
                    else:
                        if side == 0:  # face (j, j+1)
                            a_, b_, c_, d_ = jm1, j, jp1, jp2
                            sU0, sU1, sU2, sU3 = U[i, a_], U[i, b_], U[i, c_], U[i, d_]
                            sT0, sT1, sT2, sT3 = T[i, a_], T[i, b_], T[i, c_], T[i, d_]
                            p0, p1, p2, p3 = phi[i, a_], phi[i, b_], phi[i, c_], phi[i, d_]
                            m0, m1, m2, m3 = mask[i, a_], mask[i, b_], mask[i, c_], mask[i, d_]
                        else:  # face (j-1, j)
                            a_, b_, c_, d_ = jm2, jm1, j, jp1
                            sU0, sU1, sU2, sU3 = U[i, a_], U[i, b_], U[i, c_], U[i, d_]
                            sT0, sT1, sT2, sT3 = T[i, a_], T[i, b_], T[i, c_], T[i, d_]
                            p0, p1, p2, p3 = phi[i, a_], phi[i, b_], phi[i, c_], phi[i, d_]
                            m0, m1, m2, m3 = mask[i, a_], mask[i, b_], mask[i, c_], mask[i, d_]

                    # solute mobility and thermal coefficient per stencil cell
                    kU0 = dU_lat * calib * (0.5 * (1.0 - p0) if p0 < 1.0 else 0.0)
                    kU1 = dU_lat * calib * (0.5 * (1.0 - p1) if p1 < 1.0 else 0.0)
                    kU2 = dU_lat * calib * (0.5 * (1.0 - p2) if p2 < 1.0 else 0.0)
                    kU3 = dU_lat * calib * (0.5 * (1.0 - p3) if p3 < 1.0 else 0.0)
                    cap0 = 0.5 * ((1.0 - p0) * capL + (1.0 + p0) * capS)
                    cap1 = 0.5 * ((1.0 - p1) * capL + (1.0 + p1) * capS)
                    cap2 = 0.5 * ((1.0 - p2) * capL + (1.0 + p2) * capS)
                    cap3 = 0.5 * ((1.0 - p3) * capL + (1.0 + p3) * capS)
                    kT0 = cap0 * 0.5 * ((1.0 - p0) * kapL_lat + (1.0 + p0) * kapS_lat)
                    kT1 = cap1 * 0.5 * ((1.0 - p1) * kapL_lat + (1.0 + p1) * kapS_lat)
                    kT2 = cap2 * 0.5 * ((1.0 - p2) * kapL_lat + (1.0 + p2) * kapS_lat)
                    kT3 = cap3 * 0.5 * ((1.0 - p3) * kapL_lat + (1.0 + p3) * kapS_lat)

                    fU = _diff_flux(sU0, sU1, sU2, sU3, kU0, kU1, kU2, kU3,
                                    m0, m1, m2, m3, 0, u_inlet_value)
                    fT = _diff_flux(sT0, sT1, sT2, sT3, kT0, kT1, kT2, kT3,
                                    m0, m1, m2, m3, t_dirichlet, t_wall)
                    if side == 0:
                        divU += fU
                        divT += fT
                    else:
                        divU -= fU
                        divT -= fT

            p = phi[i, j]
            cap = 0.5 * ((1.0 - p) * capL + (1.0 + p) * capS)
            dp = dphi[i, j]
            U_new[i, j] = U[i, j] - advU + divU - 0.5 * uptake * dp
            T_new[i, j] = T[i, j] - advT + divT / cap + 0.5 * (heatK / cap) * dp


@njit(cache=True)
def refresh_boundary(values, bc_i, bc_j, bc_pi, bc_pj, bc_kind, fixed_value):
    """Copy mirror/outlet ghosts and pin Dirichlet values.

    bc_kind: 0 mirror from partner (zero-flux wall), 1 fixed value
    (inlet / Dirichlet), 2 copy from partner (outlet zero-gradient).
    """
    for n in range(bc_i.shape[0]):
        k = bc_kind[n]
        if k == 1:
            values[bc_i[n], bc_j[n]] = fixed_value
        else:
            values[bc_i[n], bc_j[n]] = values[bc_pi[n], bc_pj[n]]
