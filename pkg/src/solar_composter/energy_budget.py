"""Off-grid PV sizing chain: consumption, production, panels, battery, regulator.

Energies are Wh/day, powers W, charges Ah.  Two power bases are supported
for the motor draw:

``rated``
    nameplate torque times nameplate speed of the motor;
``load``
    drum torque times drum speed, divided by the motor and gearbox
    efficiencies.
"""

from dataclasses import dataclass
from enum import Enum
from math import ceil

from .drivetrain import RPM_TO_RAD_S
from .errors import InvalidInputError


class PowerMode(str, Enum):
    RATED = "rated"
    LOAD = "load"


@dataclass(frozen=True)
class DutySchedule:
    sessions_per_day: int = 2
    session_minutes: float = 10.0
    # Session k starts at first_session_h + k * session_spacing_h (hours of day).
    first_session_h: float = 10.0
    session_spacing_h: float = 4.0

    def __post_init__(self):
        if not isinstance(self.sessions_per_day, int) or self.sessions_per_day < 0:
            raise InvalidInputError("sessions_per_day must be an integer >= 0",
                                    "sessions_per_day")
        if self.session_minutes < 0:
            raise InvalidInputError("session_minutes must be >= 0",
                                    "session_minutes")
        if not 0 <= self.first_session_h < 24:
            raise InvalidInputError("first_session_h must be in [0, 24)",
                                    "first_session_h")
        if self.sessions_per_day > 1:
            if self.session_spacing_h * 60 < self.session_minutes:
                raise InvalidInputError("sessions overlap", "session_spacing_h")
        if self.sessions_per_day * self.session_minutes > 24 * 60:
            raise InvalidInputError("sessions exceed one day", "session_minutes")
        last_end = (self.first_session_h
                    + max(self.sessions_per_day - 1, 0) * self.session_spacing_h
                    + self.session_minutes / 60.0)
        if self.sessions_per_day and last_end > 24 + self.first_session_h:
            raise InvalidInputError("sessions wrap into the next day's first "
                                    "session", "session_spacing_h")

    @property
    def daily_runtime_h(self):
        return self.sessions_per_day * self.session_minutes / 60.0

    def sessions_s(self):
        """``(start, end)`` of each session in seconds after midnight."""
        return [((self.first_session_h + k * self.session_spacing_h) * 3600.0,
                 (self.first_session_h + k * self.session_spacing_h) * 3600.0
                 + self.session_minutes * 60.0)
                for k in range(self.sessions_per_day)]


@dataclass(frozen=True)
class EnergyBudget:
    motor_power: float
    daily_runtime: float
    energy_consumed: float
    system_factor_K: float
    energy_required: float
    power_mode: PowerMode


@dataclass(frozen=True)
class PanelSizing:
    required_peak: float
    unit_peak: float
    panel_count: int
    daily_irradiation: float


@dataclass(frozen=True)
class BatterySizing:
    voltage: float
    autonomy_days: float
    discharge_depth: float
    capacity_required: float
    unit_capacity: float
    paper_amperage: float
    battery_count: int            # ceil(paper_amperage / unit_capacity)
    capacity_count: int           # ceil(capacity_required / unit_capacity)


@dataclass(frozen=True)
class RegulatorRequirement:
    voltage: float
    min_power: float
    min_current: float


def _count(numerator, denominator):
    # Round away float noise such as 2.0000000000000004 before the ceiling.
    return int(ceil(round(numerator / denominator, 9))) if numerator > 0 else 0


def motor_electrical_power(mode, motor, drivetrain):
    mode = PowerMode(mode)
    if mode is PowerMode.RATED:
        return motor.rated_torque * motor.rated_speed * RPM_TO_RAD_S
    return (drivetrain.load_torque * drivetrain.drum_speed * RPM_TO_RAD_S
            / drivetrain.chain_efficiency)


def daily_energy_consumed(power, schedule):
    if power < 0:
        raise InvalidInputError("power must be >= 0", "power")
    return power * schedule.daily_runtime_h


def required_production(consumed, K=0.65):
    if not 0 < K <= 1:
        raise InvalidInputError(f"system factor K must be in (0, 1], got {K}",
                                "system_factor")
    return consumed / K


def panel_sizing(required, irradiation=5.0, unit_peak=20.0):
    """Peak power needed from the daily production and the site irradiation.

    ``irradiation`` is in kWh/m2/day, read as equivalent full-sun hours, so
    ``required / irradiation`` is directly in Wp.
    """
    if irradiation <= 0:
        raise InvalidInputError("irradiation must be > 0", "irradiation")
    if unit_peak <= 0:
        raise InvalidInputError("unit_peak must be > 0", "unit_peak")
    peak = required / irradiation
    return PanelSizing(required_peak=peak, unit_peak=unit_peak,
                       panel_count=_count(peak, unit_peak),
                       daily_irradiation=irradiation)


def battery_sizing(consumed, autonomy_days=3, discharge_depth=0.9, voltage=12.0,
                   unit_capacity=40.0):
    """Bank capacity ``E_c * N / (D * U)`` and unit counts.

    ``paper_amperage`` is the literal ``U * D`` product and ``battery_count``
    divides it by the unit capacity as written in the source method; the
    dimensionally sound ``capacity_count`` is reported beside it.
    """
    if voltage <= 0:
        raise InvalidInputError("voltage must be > 0", "voltage")
    if not 0 < discharge_depth <= 1:
        raise InvalidInputError("discharge_depth must be in (0, 1]",
                                "discharge_depth")
    if unit_capacity <= 0:
        raise InvalidInputError("unit_capacity must be > 0", "unit_capacity")
    if autonomy_days < 0 or consumed < 0:
        raise InvalidInputError("consumed and autonomy_days must be >= 0")
    capacity = consumed * autonomy_days / (discharge_depth * voltage)
    amperage = voltage * discharge_depth
    return BatterySizing(
        voltage=voltage,
        autonomy_days=autonomy_days,
        discharge_depth=discharge_depth,
        capacity_required=capacity,
        unit_capacity=unit_capacity,
        paper_amperage=amperage,
        battery_count=_count(amperage, unit_capacity) if capacity > 0 else 0,
        capacity_count=_count(capacity, unit_capacity),
    )


def regulator_requirements(generator_voltage, array_peak):
    if generator_voltage <= 0:
        raise InvalidInputError("generator_voltage must be > 0",
                                "generator_voltage")
    if array_peak < 0:
        raise InvalidInputError("array_peak must be >= 0", "array_peak")
    return RegulatorRequirement(voltage=generator_voltage, min_power=array_peak,
                                min_current=array_peak / generator_voltage)


def energy_budget(mode, motor, drivetrain, schedule, K=0.65):
    """Motor power, consumption and required production for one power mode."""
    mode = PowerMode(mode)
    power = motor_electrical_power(mode, motor, drivetrain)
    consumed = daily_energy_consumed(power, schedule)
    return EnergyBudget(
        motor_power=power,
        daily_runtime=schedule.daily_runtime_h,
        energy_consumed=consumed,
        system_factor_K=K,
        energy_required=required_production(consumed, K),
        power_mode=mode,
    )
