"""Run configuration: flat key = value text with section headers.

The format is deliberately dependency-free: ``[section]`` lines group
``key = value`` pairs, ``#`` starts a comment, keys are fixed per
section and unknown keys are rejected with the offending line number.
Parsing then re-serializing yields a canonical byte-stable form
(sections in declaration order, keys sorted).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .boxsim import BoxConfig
from .driver import ScenarioConfig
from .geometry import SeedSpec
from .materials import MaterialError, MaterialParams


class ConfigError(ValueError):
    pass


_FLOAT = "float"
_INT = "int"
_STR = "str"
_BOOL = "bool"
_AUTO_FLOAT = "auto_float"   # literal "auto" or a float

SCHEMA: dict[str, dict[str, tuple[str, str]]] = {
    "run": {
        "scenario": (_STR, "reactor"),        # reactor | adiabatic | gaussian
        "t_end_s": (_FLOAT, "3600"),
        "output_every_s": (_FLOAT, "300"),
        "snapshot_every_s": (_FLOAT, "0"),
        "threads": (_INT, "0"),
    },
    "grid": {
        "dx_mm": (_FLOAT, "0.1"),
        "dt_s": (_AUTO_FLOAT, "auto"),
        "resolution": (_INT, "50"),
    },
    "scenario": {
        "u0": (_FLOAT, "0.045"),
        "t_wall_k": (_FLOAT, "298.15"),
        "u_in_mm_s": (_FLOAT, "0"),
        "nu_f_mm2_s": (_FLOAT, "1.0"),
        "diameter_mm": (_FLOAT, "40"),
        "channel_width_mm": (_FLOAT, "4"),
        "baffle_position": (_INT, "0"),
        "seed_shape": (_STR, "hexagon"),
        "seed_radius_mm": (_FLOAT, "0.75"),
        "seed_orientation_rad": (_FLOAT, "0"),
        "box_edge_mm": (_FLOAT, "10"),
        "c0_mol_cm3": (_FLOAT, "0.887e-3"),
    },
    "materials": {
        "dh_cryst_kj_mol": (_FLOAT, "-18.5"),
        "cp_solid_j_mol_k": (_FLOAT, "160.5"),
        "cp_liquid_j_mol_k": (_FLOAT, "75"),
        "kappa_solid_mm2_s": (_FLOAT, "1.1"),
        "kappa_liquid_mm2_s": (_FLOAT, "0.146"),
        "diffusivity_mm2_s": (_FLOAT, "1.2e-3"),
        "k0_cm_s": (_FLOAT, "1e-5"),
        "rho_solid_g_cm3": (_FLOAT, "1.341"),
        "rho_liquid_g_cm3": (_FLOAT, "1.0"),
        "anisotropy_strength": (_FLOAT, "0.05"),
        "interface_width_mm": (_FLOAT, "0.25"),
        "relaxation_time_s": (_FLOAT, "0.02"),
        "coupling": (_FLOAT, "3.0"),
    },
    "model": {
        "thermal_coupling": (_STR, "saturation"),
        "coupling_scale": (_FLOAT, "1.0"),
        "curvature_compensation": (_BOOL, "auto"),
        "uptake": (_AUTO_FLOAT, "auto"),
        "solute_calibration": (_AUTO_FLOAT, "auto"),
        "kappa_scale": (_FLOAT, "1.0"),
        "tau0_scale": (_FLOAT, "1.0"),
        "solute_boost": (_FLOAT, "1.0"),
        "mach_ceiling": (_FLOAT, "0.15"),
    },
}

_SECTIONS = list(SCHEMA)


@dataclass
class RunConfig:
    values: dict[str, dict[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        for sec, keys in SCHEMA.items():
            self.values.setdefault(sec, {})
            for key, (_, default) in keys.items():
                self.values[sec].setdefault(key, default)

    # -- typed access -----------------------------------------------------

    def get(self, section: str, key: str):
        kind, _ = SCHEMA[section][key]
        raw = self.values[section][key]
        if kind == _FLOAT:
            return float(raw)
        if kind == _INT:
            return int(raw)
        if kind == _BOOL:
            if raw == "auto":
                return None
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ConfigError(f"{section}.{key}: not a boolean: {raw!r}")
        if kind == _AUTO_FLOAT:
            return None if raw == "auto" else float(raw)
        return raw

    def set(self, section: str, key: str, value) -> None:
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown config key [{section}] {key}")
        self.values[section][key] = _fmt(value)

    # -- serialization ----------------------------------------------------

    def canonical_text(self) -> str:
        lines = []
        for sec in _SECTIONS:
            lines.append(f"[{sec}]")
            for key in sorted(self.values[sec]):
                lines.append(f"{key} = {self.values[sec][key]}")
            lines.append("")
        return "\n".join(lines)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.canonical_text())

    # -- model objects ------------------------------------------------------

    def scenario_kind(self) -> str:
        kind = self.get("run", "scenario")
        if kind not in ("reactor", "adiabatic", "gaussian"):
            raise ConfigError(f"unknown scenario {kind!r}")
        return kind

    def materials(self) -> MaterialParams:
        g = lambda k: self.get("materials", k)
        return MaterialParams(
            dH_cryst=g("dh_cryst_kj_mol"),
            cp_solid=g("cp_solid_j_mol_k"),
            cp_liquid=g("cp_liquid_j_mol_k"),
            kappa_solid=g("kappa_solid_mm2_s"),
            kappa_liquid=g("kappa_liquid_mm2_s"),
            diffusivity=g("diffusivity_mm2_s"),
            k0=g("k0_cm_s"),
            rho_solid=g("rho_solid_g_cm3"),
            rho_liquid=g("rho_liquid_g_cm3"),
            anisotropy_strength=g("anisotropy_strength"),
            interface_width=g("interface_width_mm"),
            relaxation_time=g("relaxation_time_s"),
            coupling=g("coupling"),
            T1=self.get("scenario", "t_wall_k"),
        )

    def to_scenario(self) -> ScenarioConfig:
        comp = self.get("model", "curvature_compensation")
        seed = SeedSpec(shape=self.get("scenario", "seed_shape"),
                        radius=self.get("scenario", "seed_radius_mm"),
                        orientation=self.get("scenario", "seed_orientation_rad"))
        return ScenarioConfig(
            dx=self.get("grid", "dx_mm"),
            dt=self.get("grid", "dt_s"),
            t_end=self.get("run", "t_end_s"),
            output_every=self.get("run", "output_every_s"),
            U0=self.get("scenario", "u0"),
            T_wall=self.get("scenario", "t_wall_k"),
            u_in=self.get("scenario", "u_in_mm_s"),
            nu_f=self.get("scenario", "nu_f_mm2_s"),
            diameter=self.get("scenario", "diameter_mm"),
            channel_width=self.get("scenario", "channel_width_mm"),
            baffle_position=self.get("scenario", "baffle_position"),
            seed=seed,
            materials=self.materials(),
            thermal_coupling=self.get("model", "thermal_coupling"),
            curvature_compensation=bool(comp) if comp is not None else False,
            uptake=self.get("model", "uptake"),
            solute_calibration=self.get("model", "solute_calibration"),
            coupling_scale=self.get("model", "coupling_scale"),
            kappa_scale=self.get("model", "kappa_scale"),
            tau0_scale=self.get("model", "tau0_scale"),
            solute_boost=self.get("model", "solute_boost"),
            mach_ceiling=self.get("model", "mach_ceiling"),
            threads=self.get("run", "threads"),
        )

    def to_box(self) -> BoxConfig:
        comp = self.get("model", "curvature_compensation")
        return BoxConfig(
            resolution=self.get("grid", "resolution"),
            edge=self.get("scenario", "box_edge_mm"),
            seed_radius=self.get("scenario", "seed_radius_mm"),
            c0=self.get("scenario", "c0_mol_cm3"),
            T0=self.get("scenario", "t_wall_k"),
            dt=self.get("grid", "dt_s"),
            t_end=self.get("run", "t_end_s"),
            output_every=self.get("run", "output_every_s"),
            materials=self.materials(),
            thermal_coupling=self.get("model", "thermal_coupling"),
            curvature_compensation=bool(comp) if comp is not None else True,
            uptake=self.get("model", "uptake"),
            solute_boost=self.get("model", "solute_boost"),
            kappa_scale=self.get("model", "kappa_scale"),
            tau0_scale=self.get("model", "tau0_scale"),
            threads=self.get("run", "threads"),
        )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value != value or math.isinf(value):
            raise ConfigError(f"non-finite config value {value}")
        return repr(value)
    return str(value)


def parse(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in SCHEMA:
                raise ConfigError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"{source}:{lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in SCHEMA[section]:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in [{section}]")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        cfg.values[section][key] = value
    _validate(cfg, source)
    return cfg


def load(path) -> RunConfig:
    with open(path) as fh:
        return parse(fh.read(), source=str(path))


def _validate(cfg: RunConfig, source: str) -> None:
    for sec in _SECTIONS:
        for key in SCHEMA[sec]:
            try:
                cfg.get(sec, key)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{source}: [{sec}] {key}: {exc}") from None
    cfg.scenario_kind()
    if cfg.get("run", "t_end_s") <= 0:
        raise ConfigError(f"{source}: t_end_s must be positive")
    if cfg.get("scenario", "u0") < 0:
        raise ConfigError(f"{source}: u0 must be non-negative")
    if cfg.get("scenario", "baffle_position") not in (0, 1, 2, 3):
        raise ConfigError(f"{source}: baffle_position must be 0..3")
    try:
        cfg.materials()
    except MaterialError as exc:
        raise ConfigError(f"{source}: {exc}") from None
