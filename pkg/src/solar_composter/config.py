"""Tool configuration: JSON schema, defaults and validation.

A config file is a JSON object whose sections map one-to-one onto the
record types of the sizing, PV and simulation modules.  Omitted sections
and fields take the defaults of the preset named by the optional
``"preset"`` key (``design`` unless stated), so an empty object ``{}``
describes the reference composter.  Unknown keys are rejected.
"""

import json
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from .drivetrain import GRAVITY, DrumSpec, GearStage, MotorSpec, PulleyPair
from .energy_budget import DutySchedule, PowerMode
from .errors import (
    ConfigFileError,
    ConfigInvariantError,
    ConfigSchemaError,
    ConfigSyntaxError,
    InvalidInputError,
)
from .pv_model import DEFAULT_IDEALITY, PvDatasheet


@dataclass(frozen=True)
class MotorDynamics:
    # None derives the gain from rated speed over rated voltage.
    steady_gain: float = None       # rpm/V
    time_constant: float = 0.1      # s

    def __post_init__(self):
        if self.steady_gain is not None and not self.steady_gain > 0:
            raise InvalidInputError("steady_gain must be > 0", "steady_gain")
        if not self.time_constant > 0:
            raise InvalidInputError("time_constant must be > 0", "time_constant")


@dataclass(frozen=True)
class BatteryConfig:
    voltage: float = 12.0
    autonomy_days: float = 3
    discharge_depth: float = 0.9
    unit_capacity: float = 40.0     # Ah
    installed_count: int = 1
    initial_soc: float = 0.45
    charge_efficiency: float = 1.0

    def __post_init__(self):
        if not self.voltage > 0:
            raise InvalidInputError("voltage must be > 0", "voltage")
        if self.autonomy_days < 0:
            raise InvalidInputError("autonomy_days must be >= 0", "autonomy_days")
        if not 0 < self.discharge_depth <= 1:
            raise InvalidInputError("discharge_depth must be in (0, 1]",
                                    "discharge_depth")
        if not self.unit_capacity > 0:
            raise InvalidInputError("unit_capacity must be > 0", "unit_capacity")
        if not isinstance(self.installed_count, int) or self.installed_count < 1:
            raise InvalidInputError("installed_count must be an integer >= 1",
                                    "installed_count")
        if not 0 <= self.initial_soc <= 1:
            raise InvalidInputError("initial_soc must be in [0, 1]", "initial_soc")
        if not 0 < self.charge_efficiency <= 1:
            raise InvalidInputError("charge_efficiency must be in (0, 1]",
                                    "charge_efficiency")

    @property
    def bank_capacity(self):
        return self.unit_capacity * self.installed_count


@dataclass(frozen=True)
class ProfileConfig:
    peak: float = 1000.0            # W/m2
    daylight_hours: float = None    # None derives it from the site irradiation
    solar_noon: float = 12.0        # h

    def __post_init__(self):
        if self.peak < 0:
            raise InvalidInputError("peak must be >= 0", "peak")
        if self.daylight_hours is not None and not 0 < self.daylight_hours <= 24:
            raise InvalidInputError("daylight_hours must be in (0, 24]",
                                    "daylight_hours")
        if not 0 <= self.solar_noon < 24:
            raise InvalidInputError("solar_noon must be in [0, 24)", "solar_noon")


@dataclass(frozen=True)
class SiteConfig:
    irradiation: float = 5.0        # kWh/m2/day
    system_factor: float = 0.65
    unit_peak: float = 20.0         # Wp per panel
    installed_panels: int = 1
    generator_voltage: float = 12.0
    cell_temperature: float = 25.0  # degC
    pv_update_interval: float = 60.0  # s, zero-order hold on the MPP lookup
    profile: ProfileConfig = field(default_factory=ProfileConfig)

    def __post_init__(self):
        if not self.irradiation > 0:
            raise InvalidInputError("irradiation must be > 0", "irradiation")
        if not 0 < self.system_factor <= 1:
            raise InvalidInputError("system_factor must be in (0, 1]",
                                    "system_factor")
        if not self.unit_peak > 0:
            raise InvalidInputError("unit_peak must be > 0", "unit_peak")
        if not isinstance(self.installed_panels, int) or self.installed_panels < 1:
            raise InvalidInputError("installed_panels must be an integer >= 1",
                                    "installed_panels")
        if not self.generator_voltage > 0:
            raise InvalidInputError("generator_voltage must be > 0",
                                    "generator_voltage")
        if not self.pv_update_interval > 0:
            raise InvalidInputError("pv_update_interval must be > 0",
                                    "pv_update_interval")

    @property
    def array_peak(self):
        return self.unit_peak * self.installed_panels


@dataclass(frozen=True)
class ToolConfig:
    drum: DrumSpec = field(default_factory=DrumSpec)
    motor: MotorSpec = field(default_factory=MotorSpec)
    motor_dynamics: MotorDynamics = field(default_factory=MotorDynamics)
    gear: GearStage = field(default_factory=GearStage)
    pulleys: PulleyPair = field(default_factory=PulleyPair)
    schedule: DutySchedule = field(default_factory=DutySchedule)
    pv_datasheet: PvDatasheet = field(default_factory=PvDatasheet)
    pv_ideality: float = DEFAULT_IDEALITY
    battery: BatteryConfig = field(default_factory=BatteryConfig)
    site: SiteConfig = field(default_factory=SiteConfig)
    gravity: float = GRAVITY
    power_mode: PowerMode = PowerMode.RATED
    paper_faithful: bool = False

    @property
    def steady_gain(self):
        gain = self.motor_dynamics.steady_gain
        return gain if gain is not None else self.motor.rated_speed / self.motor.voltage

    @property
    def installed_reduction(self):
        """Reduction of the fitted hardware: gearbox times belt stage."""
        return self.gear.reduction_factor * self.pulleys.reduction_factor


SystemConfig = ToolConfig

# The drivetrain is sized around a 1500 rpm motor; the simulated motor of the
# reference study runs at 150 rpm through a 37.5:1 gearbox and direct belt.
PRESETS = {
    "design": ToolConfig(),
    "paper-sim": ToolConfig(
        motor=MotorSpec(rated_speed=150.0),
        gear=GearStage(reduction_factor=37.5),
        pulleys=PulleyPair(drive_diameter=50.0, driven_diameter=50.0),
    ),
}

_SECTIONS = {
    "drum": DrumSpec,
    "motor": MotorSpec,
    "motor_dynamics": MotorDynamics,
    "gear": GearStage,
    "pulleys": PulleyPair,
    "schedule": DutySchedule,
    "pv_datasheet": PvDatasheet,
    "battery": BatteryConfig,
    "site": SiteConfig,
}
_NESTED = {("site", "profile"): ProfileConfig}
_SCALARS = {"pv_ideality", "gravity", "power_mode", "paper_faithful"}
_INT_FIELDS = {"sessions_per_day", "series_cells", "installed_count",
               "installed_panels"}


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce(path, name, value, default):
    if name in _INT_FIELDS:
        if not (isinstance(value, int) and not isinstance(value, bool)):
            raise ConfigSchemaError(f"{path} must be an integer", path)
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigSchemaError(f"{path} must be a boolean", path)
        return value
    if value is None and default is None:
        return None
    if not _is_number(value):
        raise ConfigSchemaError(f"{path} must be a number", path)
    return float(value)


def _build_record(path, cls, base, data):
    if not isinstance(data, dict):
        raise ConfigSchemaError(f"{path} must be an object", path)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigSchemaError(f"unknown key {path}.{unknown[0]}",
                                f"{path}.{unknown[0]}")
    changes = {}
    for name, value in data.items():
        sub_path = f"{path}.{name}"
        nested = _NESTED.get((path, name))
        if nested is not None:
            changes[name] = _build_record(sub_path, nested, getattr(base, name), value)
        else:
            changes[name] = _coerce(sub_path, name, value, getattr(base, name))
    try:
        return replace(base, **changes)
    except InvalidInputError as exc:
        where = f"{path}.{exc.field}" if exc.field else path
        raise ConfigInvariantError(f"{where}: {exc}", where) from exc


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigSchemaError("configuration must be a JSON object", "")
    data = dict(data)
    preset = data.pop("preset", "design")
    if preset not in PRESETS:
        raise ConfigSchemaError(
            f"preset must be one of {sorted(PRESETS)}, got {preset!r}", "preset")
    base = PRESETS[preset]
    unknown = sorted(set(data) - set(_SECTIONS) - _SCALARS)
    if unknown:
        raise ConfigSchemaError(f"unknown key {unknown[0]}", unknown[0])

    changes = {}
    for name, cls in _SECTIONS.items():
        if name in data:
            changes[name] = _build_record(name, cls, getattr(base, name), data[name])
    if "pv_ideality" in data:
        value = _coerce("pv_ideality", "pv_ideality", data["pv_ideality"], 1.0)
        if not 0.8 <= value <= 2.5:
            raise ConfigInvariantError("pv_ideality must be in [0.8, 2.5]",
                                       "pv_ideality")
        changes["pv_ideality"] = value
    if "gravity" in data:
        value = _coerce("gravity", "gravity", data["gravity"], 1.0)
        if not value > 0:
            raise ConfigInvariantError("gravity must be > 0", "gravity")
        changes["gravity"] = value
    if "power_mode" in data:
        try:
            changes["power_mode"] = PowerMode(data["power_mode"])
        except ValueError:
            raise ConfigSchemaError(
                "power_mode must be 'rated' or 'load'", "power_mode") from None
    if "paper_faithful" in data:
        changes["paper_faithful"] = _coerce("paper_faithful", "paper_faithful",
                                            data["paper_faithful"], False)
    return replace(base, **changes)


def bundled_config_path(name="paper"):
    return resources.files("solar_composter") / "presets" / f"{name}.json"


def parse_config(path):
    """Read, validate and complete a JSON configuration file.

    ``preset:<name>`` loads one of the bundled files (``paper``,
    ``paper-sim``) instead of a path on disk.
    """
    path_str = str(path)
    if path_str.startswith("preset:"):
        target = bundled_config_path(path_str.split(":", 1)[1])
    else:
        target = Path(path)
    try:
        text = target.read_text(encoding="utf-8")
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        raise ConfigFileError(f"cannot read config {path_str}: {exc}", path_str) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"{path_str}: invalid JSON: {exc}", path_str) from exc
    return config_from_dict(data)


def config_to_dict(config):
    """Plain-JSON view of a config, suitable for embedding in reports."""
    out = {}
    for name in _SECTIONS:
        record = getattr(config, name)
        section = {}
        for f in fields(record):
            value = getattr(record, f.name)
            if (name, f.name) in _NESTED:
                value = {g.name: getattr(value, g.name) for g in fields(value)}
            section[f.name] = value
        out[name] = section
    out["pv_ideality"] = config.pv_ideality
    out["gravity"] = config.gravity
    out["power_mode"] = config.power_mode.value
    out["paper_faithful"] = config.paper_faithful
    return out
