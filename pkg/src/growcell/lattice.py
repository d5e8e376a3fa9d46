"""Discrete velocity sets for the lattice-Boltzmann solvers.

Two stencils are provided: D2Q9 for the 2D flow and phase-field solvers,
and D3Q7 for the 3D phase-field solver used by the closed-cell
verification runs (flow is 2D only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    """A discrete velocity set with its quadrature weights.

    Attributes:
        name: stencil identifier ("D2Q9" or "D3Q7").
        dimension: spatial dimension (2 or 3).
        velocities: integer array of shape (Q, dimension).
        weights: quadrature weights, shape (Q,), summing to 1.
        cs2: squared lattice sound speed.
        opposite: index of the reversed velocity for each direction.
    """

    name: str
    dimension: int
    velocities: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    cs2: float
    opposite: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return len(self.weights)


def _opposites(c: np.ndarray) -> np.ndarray:
    opp = np.empty(len(c), dtype=np.int64)
    for i, ci in enumerate(c):
        matches = np.where((c == -ci).all(axis=1))[0]
        opp[i] = matches[0]
    return opp


def _d2q9() -> LatticeSpec:
    c = np.array(
        [
            [0, 0],
            [1, 0], [0, 1], [-1, 0], [0, -1],
            [1, 1], [-1, 1], [-1, -1], [1, -1],
        ],
        dtype=np.int64,
    )
    w = np.array([4.0 / 9.0] + [1.0 / 9.0] * 4 + [1.0 / 36.0] * 4)
    return LatticeSpec("D2Q9", 2, c, w, 1.0 / 3.0, _opposites(c))


def _d3q7() -> LatticeSpec:
    c = np.array(
        [
            [0, 0, 0],
            [1, 0, 0], [-1, 0, 0],
            [0, 1, 0], [0, -1, 0],
            [0, 0, 1], [0, 0, -1],
        ],
        dtype=np.int64,
    )
    w = np.array([1.0 / 4.0] + [1.0 / 8.0] * 6)
    return LatticeSpec("D3Q7", 3, c, w, 1.0 / 4.0, _opposites(c))


def make_lattice(dimension: int, family: str) -> LatticeSpec:
    """Return the velocity set for a solver family.

    2D uses D2Q9 for both the flow and phase families. 3D is supported
    only for the phase family (D3Q7); there is no 3D flow solver.
    """
    if family not in ("flow", "phase"):
        raise ValueError(f"unknown lattice family {family!r}")
    if dimension == 2:
        return _d2q9()
    if dimension == 3:
        if family == "flow":
            raise ValueError("3D flow unsupported")
        return _d3q7()
    raise ValueError(f"unsupported dimension {dimension}")
