"""Cell geometry: reactor outline, inlet/outlet, baffles, and seeds.

The growth cell is a circular chamber with a feed channel on the left
and a drain on the right; an optional flat baffle between the inlet and
the crystal shields the seed from the incoming jet. Geometry is
rasterized onto the structured grid as per-cell tags, and each boundary
cell is paired with its nearest fluid neighbor so the scalar solver can
maintain ghost values (mirror, fixed, or copy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FLUID, WALL, INLET, OUTLET = 0, 1, 2, 3

# mirror / fixed value / copy, see _kernels2d.refresh_boundary
BC_MIRROR, BC_FIXED, BC_COPY = 0, 1, 2

# baffle presets: fraction of the inlet-mouth-to-center distance
BAFFLE_FRACTIONS = {1: 0.2, 2: 0.45, 3: 0.7}


class GeometryError(ValueError):
    pass


@dataclass
class SeedSpec:
    shape: str = "hexagon"          # hexagon | sphere | none
    radius: float = 0.75            # mm; circumradius (hexagon) or radius
    center: tuple[float, ...] | None = None  # mm; None = domain center
    orientation: float = 0.0        # rad, facet-normal 1 direction


@dataclass
class BoundaryList:
    """Flat arrays describing boundary cells and their fluid partners."""

    ii: np.ndarray
    jj: np.ndarray
    pi: np.ndarray
    pj: np.ndarray
    kind_wall_mirror: np.ndarray   # per-cell kinds for zero-flux walls
    kind_wall_fixed: np.ndarray    # per-cell kinds for Dirichlet walls


@dataclass
class GeometryMask:
    tags: np.ndarray               # int8, FLUID/WALL/INLET/OUTLET
    dx: float                      # mm
    seed: SeedSpec
    bc: BoundaryList | None = None
    inlet_axis: int = 0            # flow enters along +x
    extras: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.tags.shape

    @property
    def fluid(self) -> np.ndarray:
        return self.tags == FLUID

    def center_cells(self) -> tuple[float, ...]:
        return tuple((n - 1) / 2.0 for n in self.tags.shape)

    def validate(self) -> None:
        for code, name in ((INLET, "inlet"), (OUTLET, "outlet")):
            cells = np.argwhere(self.tags == code)
            if len(cells) == 0:
                continue
            spread = cells.max(axis=0) - cells.min(axis=0)
            count = len(cells)
            if np.prod(spread + 1) != count:
                raise GeometryError(f"{name} cells do not form a contiguous block")


def _boundary_pairs(tags: np.ndarray) -> BoundaryList:
    """Pair every non-fluid cell that touches fluid with one fluid neighbor."""
    nx, ny = tags.shape
    ii, jj, pi, pj, kmirror, kfixed = [], [], [], [], [], []
    for i in range(nx):
        for j in range(ny):
            t = tags[i, j]
            if t == FLUID:
                continue
            partner = None
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ni, nj = i + di, j + dj
                if 0 <= ni < nx and 0 <= nj < ny and tags[ni, nj] == FLUID:
                    partner = (ni, nj)
                    break
            if partner is None:
                continue
            ii.append(i)
            jj.append(j)
            pi.append(partner[0])
            pj.append(partner[1])
            if t == INLET:
                kmirror.append(BC_FIXED)
                kfixed.append(BC_FIXED)
            elif t == OUTLET:
                kmirror.append(BC_COPY)
                kfixed.append(BC_COPY)
            else:
                kmirror.append(BC_MIRROR)
                kfixed.append(BC_FIXED)
    arr = lambda seq, dt: np.asarray(seq, dtype=dt)
    return BoundaryList(arr(ii, np.int64), arr(jj, np.int64),
                        arr(pi, np.int64), arr(pj, np.int64),
                        arr(kmirror, np.int8), arr(kfixed, np.int8))


def reactor(dx: float, diameter: float = 40.0, channel_width: float = 4.0,
            channel_length: float | None = None,
            baffle_position: int = 0,
            baffle_length: float | None = None,
            baffle_thickness: float | None = None,
            seed: SeedSpec | None = None) -> GeometryMask:
    """Circular growth cell with inlet and outlet channels at mid-height."""
    if baffle_position not in (0, 1, 2, 3):
        raise GeometryError(f"baffle position must be 0..3 (got {baffle_position})")
    seed = seed or SeedSpec()
    channel_length = channel_length if channel_length is not None else 2.0 * dx
    margin = 2  # cells of wall padding so every stencil stays on-grid

    radius = diameter / 2.0
    nchan = max(2, int(round(channel_length / dx)))
    ncells = int(round(diameter / dx))
    nx = ncells + 2 * nchan + 2 * margin
    ny = ncells + 2 * margin
    tags = np.full((nx, ny), WALL, dtype=np.int8)

    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    xs = (np.arange(nx) - cx) * dx
    ys = (np.arange(ny) - cy) * dx
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = X**2 + Y**2 <= radius**2
    tags[inside] = FLUID

    half_w = channel_width / 2.0
    in_strip = np.abs(Y) <= half_w + 1.0e-9
    left = X < 0
    right = X > 0
    chan = in_strip & ((left & (X >= xs[margin] - 1e-9)) | (right & (X <= xs[nx - margin - 1] + 1e-9)))
    tags[chan & ~inside] = FLUID

    strip_rows = np.abs(ys - 0.0) <= half_w + 1.0e-9
    for col in range(margin):
        tags[col, :] = WALL
        tags[nx - 1 - col, :] = WALL
    tags[margin - 1, strip_rows] = INLET
    tags[margin - 2, strip_rows] = INLET
    tags[nx - margin, strip_rows] = OUTLET
    tags[nx - margin + 1, strip_rows] = OUTLET

    extras = {"diameter": diameter, "channel_width": channel_width}
    if baffle_position:
        frac = BAFFLE_FRACTIONS[baffle_position]
        x_mouth = -math.sqrt(max(radius**2 - half_w**2, 0.0))
        xb = x_mouth + frac * (0.0 - x_mouth)
        blen = baffle_length if baffle_length is not None else 1.5 * channel_width
        bthk = baffle_thickness if baffle_thickness is not None else max(2.0 * dx, 0.4)
        bmask = (np.abs(X - xb) <= bthk / 2.0) & (np.abs(Y) <= blen / 2.0)
        tags[bmask] = WALL
        extras["baffle_x"] = xb
        extras["baffle_length"] = blen

    geom = GeometryMask(tags, dx, seed)
    geom.bc = _boundary_pairs(tags)
    geom.validate()
    _check_seed_clearance(geom)
    return geom


def closed_box(shape: tuple[int, ...], dx: float,
               seed: SeedSpec | None = None, margin: int = 2) -> GeometryMask:
    """Closed (zero-flux) box: fluid interior with a wall shell."""
    seed = seed or SeedSpec(shape="sphere", radius=1.0)
    full = tuple(n + 2 * margin for n in shape)
    tags = np.full(full, WALL, dtype=np.int8)
    core = tuple(slice(margin, margin + n) for n in shape)
    tags[core] = FLUID
    geom = GeometryMask(tags, dx, seed)
    if tags.ndim == 2:
        geom.bc = _boundary_pairs(tags)
    return geom


def _check_seed_clearance(geom: GeometryMask) -> None:
    seed = geom.seed
    if seed.shape == "none" or seed.radius <= 0:
        return
    cc = list(geom.center_cells())
    if seed.center is not None:
        for k in range(len(cc)):
            cc[k] += seed.center[k] / geom.dx
    r_cells = seed.radius / geom.dx
    for idx in np.argwhere((geom.tags == INLET) | (geom.tags == OUTLET)):
        d = math.sqrt(sum((idx[k] - cc[k]) ** 2 for k in range(len(cc))))
        if d <= r_cells:
            raise GeometryError("seed overlaps inlet/outlet cells")


def hexagon_profile(geom: GeometryMask, interface_width: float) -> np.ndarray:
    """Order parameter of a hexagonal seed: +1 inside, tanh transition.

    The hexagon is defined by its six facet normals at ``orientation``
    + k*60 degrees with apothem = circumradius * cos(30 deg), so the
    facet distances measured by the shape metrics start at the apothem.
    """
    seed = geom.seed
    nx, ny = geom.tags.shape
    cc = geom.center_cells()
    xs = (np.arange(nx) - cc[0]) * geom.dx
    ys = (np.arange(ny) - cc[1]) * geom.dx
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    if seed.center is not None:
        X = X - seed.center[0]
        Y = Y - seed.center[1]
    if seed.shape == "none" or seed.radius <= 0:
        return np.full_like(X, -1.0)
    if seed.shape == "sphere":
        dist = np.sqrt(X**2 + Y**2) - seed.radius
    else:
        apothem = seed.radius * math.cos(math.pi / 6.0)
        dist = np.full_like(X, -np.inf)
        for k in range(6):
            ang = seed.orientation + k * math.pi / 3.0
            dist = np.maximum(dist, X * math.cos(ang) + Y * math.sin(ang) - apothem)
    phi = -np.tanh(dist / (math.sqrt(2.0) * interface_width))
    phi[geom.tags != FLUID] = -1.0
    return phi


def sphere_profile(geom: GeometryMask, interface_width: float) -> np.ndarray:
    """Order parameter of a spherical seed in a 3D box."""
    seed = geom.seed
    cc = geom.center_cells()
    axes = [np.arange(n) for n in geom.tags.shape]
    grids = np.meshgrid(*axes, indexing="ij")
    r2 = sum(((g - c) * geom.dx) ** 2 for g, c in zip(grids, cc))
    dist = np.sqrt(r2) - seed.radius
    phi = -np.tanh(dist / (math.sqrt(2.0) * interface_width))
    phi[geom.tags != FLUID] = -1.0
    return phi
