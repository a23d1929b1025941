"""Run configuration: YAML file -> validated, frozen dataclasses.

Example file::

    laser:
      wavelength_nm: 800
      intensity_Wcm2: 2.0e13     # or field_au, not both
    molecule:
      R_bohr: 3.0
      E_ion_hartree: 0.6045
    scan:
      i_min: 1.0e13
      i_max: 2.0e14
      n_points: 16

Unknown keys are rejected with the line they appear on.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import yaml

from mosfa.molecule import MoleculeModel
from mosfa.pulse_yield import COULOMB_MODES
from mosfa.units import LaserParams, derive_params, intensity_to_field, wavelength_to_omega


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LaserConfig:
    wavelength_nm: float
    intensity_Wcm2: Optional[float] = None
    field_au: Optional[float] = None


@dataclass(frozen=True)
class MoleculeConfig:
    R_bohr: float
    E_ion_hartree: float
    N_e: int = 2
    chi_deg: float = 0.0


@dataclass(frozen=True)
class PulseConfig:
    n_cycles: int = 10


@dataclass(frozen=True)
class ScanConfig:
    i_min: Optional[float] = None
    i_max: Optional[float] = None
    n_points: int = 16
    rescale: float = 1.0


@dataclass(frozen=True)
class NumericsConfig:
    rtol: float = 1e-8
    n_max: Optional[int] = None
    focal_imin_fraction: float = 0.01
    field_grid_points: int = 64
    yield_grid_points: int = 96
    coulomb_field: str = "envelope"
    workers: int = 1


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str] = None
    precision: int = 17


@dataclass(frozen=True)
class RunConfig:
    laser: LaserConfig
    molecule: MoleculeConfig
    pulse: PulseConfig = field(default_factory=PulseConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self):
        _validate(self)

    @property
    def omega(self) -> float:
        return wavelength_to_omega(self.laser.wavelength_nm)

    @property
    def field_peak(self) -> float:
        if self.laser.field_au is not None:
            return self.laser.field_au
        return intensity_to_field(self.laser.intensity_Wcm2)

    def laser_params(self) -> LaserParams:
        return derive_params(self.field_peak, self.omega)

    def molecule_model(self) -> MoleculeModel:
        m = self.molecule
        return MoleculeModel.from_config(m.R_bohr, m.E_ion_hartree, m.N_e, m.chi_deg)

    def replace(self, section: str, **changes) -> "RunConfig":
        sub = dataclasses.replace(getattr(self, section), **changes)
        return dataclasses.replace(self, **{section: sub})

    def flat(self) -> Dict[str, Any]:
        """Dotted key -> value for every field, in declaration order.

        ``output.path`` is left out so the echo does not depend on where a
        run is written.
        """
        out = {}
        for sec in dataclasses.fields(self):
            for f in dataclasses.fields(getattr(self, sec.name)):
                key = f"{sec.name}.{f.name}"
                if key != "output.path":
                    out[key] = getattr(getattr(self, sec.name), f.name)
        return out


SECTIONS = {
    "laser": LaserConfig,
    "molecule": MoleculeConfig,
    "pulse": PulseConfig,
    "scan": ScanConfig,
    "numerics": NumericsConfig,
    "output": OutputConfig,
}
REQUIRED = {"laser": ("wavelength_nm",), "molecule": ("R_bohr", "E_ion_hartree")}


def _positive(name, value, allow_zero=False):
    ok = value >= 0 if allow_zero else value > 0
    if not (ok and math.isfinite(value)):
        bound = "nonnegative" if allow_zero else "positive"
        raise ConfigError(f"{name} must be {bound} and finite, got {value}")


def _validate(cfg: RunConfig):
    las, mol, num, scan = cfg.laser, cfg.molecule, cfg.numerics, cfg.scan
    _positive("laser.wavelength_nm", las.wavelength_nm)
    if (las.intensity_Wcm2 is None) == (las.field_au is None):
        if las.intensity_Wcm2 is None:
            raise ConfigError("laser needs one of intensity_Wcm2 or field_au")
        raise ConfigError("laser.intensity_Wcm2 and laser.field_au are both set; give only one")
    if las.intensity_Wcm2 is not None:
        _positive("laser.intensity_Wcm2", las.intensity_Wcm2)
    else:
        _positive("laser.field_au", las.field_au)
    _positive("molecule.R_bohr", mol.R_bohr, allow_zero=True)
    _positive("molecule.E_ion_hartree", mol.E_ion_hartree)
    _positive("molecule.N_e", mol.N_e)
    if not 0.0 <= mol.chi_deg <= 90.0:
        raise ConfigError(f"molecule.chi_deg must lie in [0, 90], got {mol.chi_deg}")
    _positive("pulse.n_cycles", cfg.pulse.n_cycles)
    _positive("numerics.rtol", num.rtol)
    if num.n_max is not None:
        _positive("numerics.n_max", num.n_max)
    if not 0.0 < num.focal_imin_fraction < 1.0:
        raise ConfigError(f"numerics.focal_imin_fraction must lie in (0, 1), got {num.focal_imin_fraction}")
    if num.field_grid_points < 2 or num.yield_grid_points < 2:
        raise ConfigError("numerics grid sizes must be at least 2")
    if num.coulomb_field not in COULOMB_MODES:
        raise ConfigError(f"numerics.coulomb_field must be one of {COULOMB_MODES}, got {num.coulomb_field!r}")
    _positive("numerics.workers", num.workers)
    for name in ("i_min", "i_max"):
        if getattr(scan, name) is not None:
            _positive(f"scan.{name}", getattr(scan, name))
    if scan.i_min is not None and scan.i_max is not None and scan.i_min > scan.i_max:
        raise ConfigError(f"scan.i_min {scan.i_min} exceeds scan.i_max {scan.i_max}")
    _positive("scan.n_points", scan.n_points)
    _positive("scan.rescale", scan.rescale)
    if not 1 <= cfg.output.precision <= 17:
        raise ConfigError(f"output.precision must lie in [1, 17], got {cfg.output.precision}")


def _coerce(name, value, typ):
    # YAML 1.1 reads 2e13 (no dot) as a string, so numbers are coerced here
    if value is None:
        return None
    try:
        if typ is int:
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if typ is float:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected {typ.__name__}, got {value!r}") from None


def _field_type(cls, name):
    hint = {f.name: f.type for f in dataclasses.fields(cls)}[name]
    for typ in (int, float, str):
        if typ.__name__ in str(hint):
            return typ
    return str


def from_mapping(data: Dict[str, Any], lines: Optional[Dict[str, int]] = None) -> RunConfig:
    """Build a RunConfig from nested dicts; ``lines`` maps dotted keys to line numbers."""
    lines = lines or {}

    def where(key):
        return f" (line {lines[key]})" if key in lines else ""

    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections")
    for sec in data:
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section '{sec}'{where(sec)}")
    for sec, cls in SECTIONS.items():
        raw = data.get(sec) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"section '{sec}' must be a mapping{where(sec)}")
        names = {f.name for f in dataclasses.fields(cls)}
        for key in raw:
            if key not in names:
                raise ConfigError(f"unknown key '{sec}.{key}'{where(sec + '.' + key)}")
    for sec, keys in REQUIRED.items():
        for key in keys:
            if key not in (data.get(sec) or {}):
                raise ConfigError(f"missing mandatory key {sec}.{key}")
    built = {}
    for sec, cls in SECTIONS.items():
        raw = data.get(sec) or {}
        kwargs = {key: _coerce(f"{sec}.{key}", value, _field_type(cls, key))
                  for key, value in raw.items()}
        built[sec] = cls(**kwargs)
    return RunConfig(**built)


def _key_lines(node, prefix=""):
    out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = f"{prefix}{k.value}"
            out[key] = k.start_mark.line + 1
            out.update(_key_lines(v, key + "."))
    return out


def parse_config(path) -> RunConfig:
    """Read and validate a YAML run configuration."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def parse_config_text(text: str) -> RunConfig:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    if data is None:
        raise ConfigError("config file is empty")
    return from_mapping(data, _key_lines(node))
