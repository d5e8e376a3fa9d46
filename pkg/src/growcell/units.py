"""Conversion between physical units (mm, s) and lattice units.

All kernels run on dimensionless lattice quantities; the conversion
happens exactly once when a run is configured. Keeping the conversion
in one place makes the stability limits auditable: a run is rejected
up front if a prescribed velocity exceeds the Mach ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass

KINDS = ("velocity", "diffusivity", "time", "length")


class UnitError(ValueError):
    pass


@dataclass(frozen=True)
class UnitSystem:
    """Grid spacing and time step tying lattice units to mm and s."""

    dx: float  # mm per cell
    dt: float  # s per step
    mach_ceiling: float = 0.1

    def __post_init__(self):
        if self.dx <= 0 or self.dt <= 0:
            raise UnitError(f"dx and dt must be positive (got {self.dx}, {self.dt})")

    def factor(self, kind: str) -> float:
        """Multiplier converting a physical value to lattice units."""
        if kind == "velocity":
            return self.dt / self.dx
        if kind == "diffusivity":
            return self.dt / self.dx**2
        if kind == "time":
            return 1.0 / self.dt
        if kind == "length":
            return 1.0 / self.dx
        raise UnitError(f"unknown kind {kind!r}; expected one of {KINDS}")

    def to_lattice(self, value: float, kind: str) -> float:
        return value * self.factor(kind)

    def to_physical(self, value: float, kind: str) -> float:
        return value / self.factor(kind)

    def check_velocity(self, u_phys: float, label: str = "velocity") -> None:
        """Reject velocities whose lattice Mach number exceeds the ceiling."""
        u_lat = abs(self.to_lattice(u_phys, "velocity"))
        if u_lat > self.mach_ceiling * (1.0 + 1e-12):
            raise UnitError(
                f"{label} = {u_phys} mm/s maps to lattice speed {u_lat:.4f}, "
                f"over the ceiling {self.mach_ceiling} (reduce dt or refine dx)"
            )
