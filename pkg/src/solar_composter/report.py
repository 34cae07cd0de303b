"""Design report: drivetrain plus both energy chains, with discrepancy flags.

Flags are findings about the configuration, not failures.  Codes:

``EQ10_VIOLATION``
    belt centre distance outside ``d_driven < C < 3 (d_drive + d_driven)``.
``TORQUE_MARGIN``
    the motor's rated torque is below the required torque.
``GEAR_RATIO_MISMATCH``
    the fitted gearbox differs from the stage reduction the speeds demand.
``PANEL_COUNT_MISMATCH``
    a power mode sizes a different panel count than is installed.
``BATTERY_CAPACITY_SHORT``
    the installed bank is smaller than a power mode requires.
``BATTERY_COUNT_BASIS``
    the literal amperage-based count and the capacity-based count differ.
``EQ5_VERBATIM``
    battery amperage is the literal ``U * D`` product (always reported).
``EQ9_NONPHYSICAL``
    paper-faithful chain output power exceeds its input power.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum

from .config import config_to_dict
from .drivetrain import chain_output_power, size_drivetrain
from .energy_budget import (
    PowerMode,
    battery_sizing,
    energy_budget,
    panel_sizing,
    regulator_requirements,
)

GEAR_RATIO_RTOL = 0.005


@dataclass(frozen=True)
class Flag:
    code: str
    message: str


@dataclass(frozen=True)
class EnergyChain:
    budget: object
    panels: object
    battery: object


@dataclass(frozen=True)
class DesignReport:
    drivetrain: object
    installed_reduction: float
    output_power: float
    output_power_basis: str
    chains: dict                    # PowerMode -> EnergyChain
    selected_mode: PowerMode
    regulator: object
    flags: list = field(default_factory=list)
    config: object = None

    def flag_codes(self):
        return [f.code for f in self.flags]

    def to_dict(self):
        return _plain({
            "config": config_to_dict(self.config) if self.config else None,
            "drivetrain": asdict(self.drivetrain),
            "installed_reduction": self.installed_reduction,
            "output_power": {"value_W": self.output_power,
                             "basis": self.output_power_basis},
            "energy": {mode.value: asdict(chain)
                       for mode, chain in self.chains.items()},
            "selected_mode": self.selected_mode,
            "regulator": asdict(self.regulator),
            "flags": [asdict(f) for f in self.flags],
        })


def _plain(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(_plain(k)): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _energy_chain(mode, config, design):
    budget = energy_budget(mode, config.motor, design, config.schedule,
                           config.site.system_factor)
    panels = panel_sizing(budget.energy_required, config.site.irradiation,
                          config.site.unit_peak)
    bat = config.battery
    battery = battery_sizing(budget.energy_consumed, bat.autonomy_days,
                             bat.discharge_depth, bat.voltage, bat.unit_capacity)
    return EnergyChain(budget=budget, panels=panels, battery=battery)


def build_report(config, paper_faithful=None):
    if paper_faithful is None:
        paper_faithful = config.paper_faithful
    design = size_drivetrain(config.drum, config.motor, config.gear,
                             config.pulleys, config.gravity)
    chains = {mode: _energy_chain(mode, config, design) for mode in PowerMode}
    rated_power = chains[PowerMode.RATED].budget.motor_power
    output_power, nonphysical = chain_output_power(
        rated_power, config.gear.efficiency, config.pulleys.efficiency,
        paper_faithful)
    regulator = regulator_requirements(config.site.generator_voltage,
                                       config.site.array_peak)

    flags = []
    wrap = design.wrap
    if not wrap.center_valid:
        p = config.pulleys
        flags.append(Flag("EQ10_VIOLATION", (
            f"centre distance {p.center_distance:g} mm is outside "
            f"({p.driven_diameter:g}, {3 * (p.drive_diameter + p.driven_diameter):g})"
            " mm for the chosen pulleys")))
    if not design.margin_ok:
        flags.append(Flag("TORQUE_MARGIN", (
            f"motor rated torque {config.motor.rated_torque:g} N.m is below the "
            f"required {design.required_motor_torque:.4f} N.m")))
    fitted = config.gear.reduction_factor
    if abs(fitted - design.gear_reduction) > GEAR_RATIO_RTOL * design.gear_reduction:
        flags.append(Flag("GEAR_RATIO_MISMATCH", (
            f"fitted gearbox {fitted:g}:1 differs from the required "
            f"{design.gear_reduction:.4f}:1")))
    for mode, chain in chains.items():
        installed = config.site.installed_panels
        if chain.panels.panel_count != installed:
            flags.append(Flag("PANEL_COUNT_MISMATCH", (
                f"{mode.value} mode needs {chain.panels.panel_count} x "
                f"{chain.panels.unit_peak:g} Wp ({chain.panels.required_peak:.2f} Wp)"
                f", {installed} installed")))
        if chain.battery.capacity_count > config.battery.installed_count:
            flags.append(Flag("BATTERY_CAPACITY_SHORT", (
                f"{mode.value} mode needs {chain.battery.capacity_required:.2f} Ah,"
                f" installed bank is {config.battery.bank_capacity:g} Ah")))
        if chain.battery.battery_count != chain.battery.capacity_count:
            flags.append(Flag("BATTERY_COUNT_BASIS", (
                f"{mode.value} mode: amperage-based count "
                f"{chain.battery.battery_count} differs from capacity-based count "
                f"{chain.battery.capacity_count}")))
    amperage = chains[PowerMode.RATED].battery.paper_amperage
    flags.append(Flag("EQ5_VERBATIM", (
        f"battery amperage {amperage:g} A is the literal voltage x depth-of-"
        "discharge product; the count derived from it is reported beside the "
        "capacity-based count")))
    if nonphysical:
        flags.append(Flag("EQ9_NONPHYSICAL", (
            f"chain output {output_power:.2f} W computed by dividing by the "
            f"efficiencies exceeds the {rated_power:.2f} W input")))

    return DesignReport(
        drivetrain=design,
        installed_reduction=config.installed_reduction,
        output_power=output_power,
        output_power_basis="paper-faithful" if paper_faithful else "physical",
        chains=chains,
        selected_mode=config.power_mode,
        regulator=regulator,
        flags=flags,
        config=config,
    )
