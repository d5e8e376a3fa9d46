"""growcell: hybrid lattice-Boltzmann / finite-difference crystal growth.

Simulates single-crystal growth of (S)-mandelic acid in a flow-through
growth cell: D2Q9 BGK hydrodynamics with diffuse-solid friction, a
modified-LBM anisotropic phase field, and WENO3 / fourth-order central
finite-difference transport of supersaturation and temperature with
latent-heat release, plus a 0D balance oracle and verification metrics.
"""

from .adiabatic import OdeState, integrate, ode_rhs
from .driver import Reactor2D, ScenarioConfig, auto_dt, reynolds
from .boxsim import AdiabaticBox3D, BoxConfig
from .geometry import GeometryMask, SeedSpec, reactor
from .lattice import LatticeSpec, make_lattice
from .materials import MaterialParams, c_sat, k_growth, supersaturation_from_concentrations
from .metrics import CrystalShape, extract_sides, gaussian_analytic, growth_rate, l2_error, quality
from .units import UnitSystem

__version__ = "0.1.0"

__all__ = [
    "AdiabaticBox3D", "BoxConfig", "CrystalShape", "GeometryMask",
    "LatticeSpec", "MaterialParams", "OdeState", "Reactor2D",
    "ScenarioConfig", "SeedSpec", "UnitSystem", "auto_dt", "c_sat",
    "extract_sides", "gaussian_analytic", "growth_rate", "integrate",
    "k_growth", "l2_error", "make_lattice", "ode_rhs", "quality",
    "reactor", "reynolds", "supersaturation_from_concentrations",
]
