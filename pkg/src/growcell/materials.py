"""Material constants for aqueous (S)-mandelic acid crystal growth.

Defaults are the published property set for growth at 25 C: enthalpy of
crystallization, molar heat capacities, thermal diffusivities, solute
diffusivity, growth-rate constant, densities, plus the diffuse-interface
parameters (anisotropy strength, interface width, relaxation time,
coupling strength).

The heat capacities are molar (J/mol/K) while densities are mass based,
so volumetric heat capacities are derived here through the molar masses
of water (liquid phase) and mandelic acid (solid phase). The saturation
law and its slope also live here because the temperature coupling of the
growth driving force depends on them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

GAS_CONSTANT = 8.314462618  # J/(mol K)

M_WATER = 18.02     # g/mol
M_MANDELIC = 152.15  # g/mol

# c_sat(T) = CSAT_OFFSET + CSAT_SLOPE * T  [mol/cm^3], T in K
CSAT_OFFSET = -0.005006
CSAT_SLOPE = 0.00001923
CSAT_BAND = (283.0, 313.0)  # correlation validity, K

FRICTION_H = 2.757  # interface shear constant of the friction force


class MaterialError(ValueError):
    pass


def c_sat(temperature: float) -> float:
    """Saturation concentration of aqueous mandelic acid, mol/cm^3."""
    return CSAT_OFFSET + CSAT_SLOPE * temperature


def supersaturation_from_concentrations(c_sat2: float, c_sat1: float) -> float:
    """Normalized supersaturation (c2 - c1) / c1 of the feed solution."""
    if c_sat1 <= 0.0:
        raise MaterialError(f"reference saturation must be positive (got {c_sat1})")
    return (c_sat2 - c_sat1) / c_sat1


def k_growth(temperature: float, k0: float = 1.0e-5,
             activation_energy: float = 0.0) -> float:
    """Kinetic growth-rate constant, cm/s.

    The rate constant is taken as temperature independent over the
    20-30 C window (activation energy 0 by default); a nonzero
    activation energy turns on the Arrhenius factor.
    """
    if activation_energy == 0.0:
        return k0
    import math
    return k0 * math.exp(-activation_energy / (GAS_CONSTANT * temperature))


@dataclass(frozen=True)
class MaterialParams:
    dH_cryst: float = -18.5       # kJ/mol, enthalpy of crystallization (< 0)
    cp_solid: float = 160.5       # J/(mol K)
    cp_liquid: float = 75.0       # J/(mol K)
    kappa_solid: float = 1.1      # mm^2/s
    kappa_liquid: float = 0.146   # mm^2/s
    diffusivity: float = 1.2e-3   # mm^2/s, solute in water
    k0: float = 1.0e-5            # cm/s, growth rate constant
    rho_solid: float = 1.341      # g/cm^3
    rho_liquid: float = 1.0       # g/cm^3
    anisotropy_strength: float = 0.05   # six-fold modulation amplitude
    interface_width: float = 0.25       # mm
    relaxation_time: float = 0.02       # s, diffuse-interface clock
    coupling: float = 3.0               # driving-force strength
    T1: float = 298.15                  # K, growth-cell temperature

    def __post_init__(self):
        positive = {
            "kappa_solid": self.kappa_solid,
            "kappa_liquid": self.kappa_liquid,
            "diffusivity": self.diffusivity,
            "k0": self.k0,
            "rho_solid": self.rho_solid,
            "rho_liquid": self.rho_liquid,
            "interface_width": self.interface_width,
            "relaxation_time": self.relaxation_time,
        }
        for name, value in positive.items():
            if value <= 0:
                raise MaterialError(f"{name} must be positive (got {value})")
        if self.dH_cryst >= 0:
            raise MaterialError(
                f"dH_cryst must be negative, heat is released on growth (got {self.dH_cryst})"
            )

    # Derived quantities -------------------------------------------------

    @property
    def molar_density_solid(self) -> float:
        """mol/cm^3 of mandelic acid in the crystal."""
        return self.rho_solid / M_MANDELIC

    @property
    def molar_density_liquid(self) -> float:
        """mol/cm^3 of water in the solution."""
        return self.rho_liquid / M_WATER

    @property
    def vol_heat_capacity_liquid(self) -> float:
        """J/(cm^3 K) of the solution (water dominated)."""
        return self.molar_density_liquid * self.cp_liquid

    @property
    def vol_heat_capacity_solid(self) -> float:
        """J/(cm^3 K) of the crystal."""
        return self.molar_density_solid * self.cp_solid

    @property
    def heat_of_growth(self) -> float:
        """J released per cm^3 of new solid (positive)."""
        return -self.dH_cryst * 1.0e3 * self.molar_density_solid

    def saturation(self, temperature: float) -> float:
        return c_sat(temperature)

    def solute_uptake(self, temperature: float | None = None) -> float:
        """Supersaturation units consumed per unit of solid formed.

        The transported field is (c - c_sat(T1)) / c_sat(T1), so locking
        one crystal molar density into the solid drains the local field
        by rho_molar / c_sat(T1).
        """
        T = self.T1 if temperature is None else temperature
        cs = c_sat(T)
        if cs <= 0:
            raise MaterialError(f"saturation not positive at T={T} K")
        return self.molar_density_solid / cs

    def saturation_coupling(self, temperature: float | None = None) -> float:
        """Slope of the saturation curve in (supersaturation, theta) space.

        Growth stops on the saturation curve c = c_sat(T) when the
        driving force is U - chi * theta with chi = slope * T1 / c_sat(T1).
        """
        T = self.T1 if temperature is None else temperature
        return CSAT_SLOPE * T / c_sat(T)

    def with_overrides(self, **kwargs) -> "MaterialParams":
        return replace(self, **kwargs)
