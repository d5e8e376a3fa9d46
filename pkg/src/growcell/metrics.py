"""Derived quantities: error norms, crystal shape, growth rate, probes.

Shape extraction walks six rays from the solid centroid along the facet
normals and locates the phi = 0 crossing by linear interpolation, which
gives sub-cell side lengths; everything downstream (growth rate,
isotropy quality) is built on those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage


class MetricsError(RuntimeError):
    pass


# --- verification helpers -------------------------------------------------

def gaussian_analytic(points: np.ndarray, t: float, sigma0: float,
                      diffusivity: np.ndarray | float) -> np.ndarray:
    """Spreading Gaussian concentration profile.

    ``points`` has shape (..., 2) in mm; ``diffusivity`` is a scalar or a
    2x2 tensor in mm^2/s. The amplitude constant is 2 pi sigma0^2, so the
    initial peak value is exactly 1.
    """
    if sigma0 <= 0:
        raise MetricsError("sigma0 must be positive")
    D = np.asarray(diffusivity, dtype=float)
    if D.ndim == 0:
        D = D * np.eye(2)
    sigma_t = sigma0 ** 2 * np.eye(2) + 2.0 * t * D
    det = np.linalg.det(sigma_t)
    if det <= 0 or np.any(np.linalg.eigvalsh(sigma_t) <= 0):
        raise MetricsError("covariance not positive definite")
    inv = np.linalg.inv(sigma_t)
    pts = np.asarray(points, dtype=float)
    quad = (pts[..., 0] ** 2 * inv[0, 0]
            + 2.0 * pts[..., 0] * pts[..., 1] * inv[0, 1]
            + pts[..., 1] ** 2 * inv[1, 1])
    psi0 = 2.0 * math.pi * sigma0 ** 2
    return psi0 / (2.0 * math.pi * math.sqrt(det)) * np.exp(-0.5 * quad)


def l2_error(C: np.ndarray, C_ref: np.ndarray) -> float:
    """Relative l2 norm sqrt(sum (C - Cref)^2 / sum Cref^2)."""
    if C.shape != C_ref.shape:
        raise MetricsError(f"shape mismatch {C.shape} vs {C_ref.shape}")
    denom = float(np.sum(C_ref * C_ref))
    if denom <= 0.0:
        raise MetricsError("reference field has zero norm")
    return math.sqrt(float(np.sum((C - C_ref) ** 2)) / denom)


def fitted_order(dxs, errors) -> float:
    """Least-squares convergence order of errors vs grid spacings."""
    x = np.log(np.asarray(dxs, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


# --- crystal shape --------------------------------------------------------

@dataclass
class CrystalShape:
    """Normal distances from the crystal centroid to its six facets, mm."""

    sides: np.ndarray          # (6,), ordered by facet angle
    centroid: tuple[float, float]  # mm
    orientation: float = 0.0   # rad, angle of facet 1's normal

    def __post_init__(self):
        self.sides = np.asarray(self.sides, dtype=float)
        if self.sides.shape != (6,):
            raise MetricsError("a hexagonal crystal has six sides")
        if np.any(self.sides <= 0):
            raise MetricsError("side distances must be positive")


def extract_sides(phi: np.ndarray, dx: float = 1.0, orientation: float = 0.0,
                  allow_multiple: bool = False) -> CrystalShape:
    """Measure the six facet distances of the crystal in a phi field.

    The centroid is the phi-weighted center of the solid (phi > 0)
    region; each side length is the distance along the facet normal
    (orientation + k * 60 degrees) to the phi = 0 crossing, located by
    linear interpolation between sample points.
    """
    solid = phi > 0.0
    if not np.any(solid):
        raise MetricsError("no solid region in the field")
    labels, count = ndimage.label(solid)
    if count > 1 and not allow_multiple:
        sizes = ndimage.sum_labels(np.ones_like(labels), labels, range(1, count + 1))
        if np.sort(sizes)[-2] > 4:  # ignore speckle
            raise MetricsError(f"{count} disconnected solid regions")
    weights = np.where(solid, phi, 0.0)
    total = float(weights.sum())
    ix, iy = np.nonzero(weights)
    cx = float((weights[ix, iy] * ix).sum()) / total
    cy = float((weights[ix, iy] * iy).sum()) / total

    nx, ny = phi.shape
    sides = np.empty(6)
    step = 0.25
    max_dist = 0.5 * min(nx, ny)
    for k in range(6):
        angle = orientation + k * math.pi / 3.0
        ca, sa = math.cos(angle), math.sin(angle)
        prev_val = _sample(phi, cx, cy)
        if prev_val <= 0.0:
            raise MetricsError("centroid is not inside the solid")
        r = step
        crossing = None
        while r < max_dist:
            val = _sample(phi, cx + r * ca, cy + r * sa)
            if val <= 0.0:
                frac = prev_val / (prev_val - val)
                crossing = r - step + frac * step
                break
            prev_val = val
            r += step
        if crossing is None:
            raise MetricsError(f"no interface crossing along facet {k + 1}")
        sides[k] = crossing * dx
    return CrystalShape(sides, ((cx + 0.0) * dx, (cy + 0.0) * dx), orientation)


def _sample(field: np.ndarray, x: float, y: float) -> float:
    """Bilinear sample at fractional index (x, y), clamped to the grid."""
    nx, ny = field.shape
    x = min(max(x, 0.0), nx - 1.001)
    y = min(max(y, 0.0), ny - 1.001)
    i, j = int(x), int(y)
    fx, fy = x - i, y - j
    return ((1 - fx) * (1 - fy) * field[i, j]
            + fx * (1 - fy) * field[i + 1, j]
            + (1 - fx) * fy * field[i, j + 1]
            + fx * fy * field[i + 1, j + 1])


def growth_rate(shape_t: CrystalShape, shape_0: CrystalShape, hours: float) -> float:
    """Average facet advance in mm/h (displacement form)."""
    if hours <= 0:
        raise MetricsError("elapsed time must be positive")
    return float(np.mean(shape_t.sides - shape_0.sides)) / hours


def growth_rate_cumulative(shape_t: CrystalShape, hours: float) -> float:
    """Average facet distance over elapsed time, mm/h.

    This is the printed definition (sum L_i / 6t); it does not vanish
    for a static seed, so the displacement form is what the solver
    reports as the rate, with this one logged alongside for reference.
    """
    if hours <= 0:
        raise MetricsError("elapsed time must be positive")
    return float(np.mean(shape_t.sides)) / hours


def quality(shape: CrystalShape) -> float:
    """Isotropy ratio max(L_i) / min(L_i); 1 means perfectly isotropic."""
    return float(np.max(shape.sides) / np.min(shape.sides))


# --- thermal probes -------------------------------------------------------

def heat_generation(dphi_dt: np.ndarray, phi: np.ndarray, params,
                    form: str = "temperature_rate") -> np.ndarray:
    """Local latent-heat release driven by interface motion.

    ``temperature_rate`` returns K/s (release divided by the local
    volumetric heat capacity); ``volumetric`` returns W/cm^3.
    """
    from .scalars import mixture_heat_capacity

    release = 0.5 * params.heat_of_growth * dphi_dt  # W/cm^3
    if form == "volumetric":
        return release
    if form == "temperature_rate":
        cap = mixture_heat_capacity(phi, params.vol_heat_capacity_liquid,
                                    params.vol_heat_capacity_solid)
        return release / cap
    raise MetricsError(f"unknown heat generation form {form!r}")


def probes(T: np.ndarray, mask: np.ndarray | None = None, dx: float = 1.0):
    """Peak temperature (value, position in mm) and the centerline profile."""
    if mask is not None:
        masked = np.where(mask, T, -np.inf)
    else:
        masked = T
    flat = int(np.argmax(masked))
    loc = np.unravel_index(flat, T.shape)
    peak = float(T[loc])
    mid = T.shape[1] // 2
    profile = T[:, mid].copy()
    return peak, tuple(float(c) * dx for c in loc), profile
