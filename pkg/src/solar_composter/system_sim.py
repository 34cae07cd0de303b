"""Fixed-step simulation of irradiance -> PV -> 12 V bus -> battery -> motor -> drum.

The bus is ideal: the PV module contributes up to its maximum power, the
battery absorbs or supplies the difference with the load, and PV output is
curtailed once the battery is full.  When the battery is empty the load is
cut to whatever the PV can carry.  The motor is a first-order lag whose
update is exact for an input held constant over a step, so large steps
simply put the motor at its steady speed.
"""

from collections import namedtuple
from dataclasses import dataclass, replace
from math import exp, floor, pi, sin

import numpy as np

from .drivetrain import size_drivetrain
from .energy_budget import motor_electrical_power
from .errors import ConfigError, InvalidInputError
from .pv_model import PvModule

DAY_S = 86400.0
SPEED_SNAP_RPM = 1e-12
SCENARIOS = ("clear-days", "blackout")

TRACE_COLUMNS = ("t_s", "irradiance_wm2", "pv_w", "load_w", "net_w", "soc",
                 "motor_rpm", "drum_rpm")
SimRecord = namedtuple("SimRecord", TRACE_COLUMNS)


@dataclass(frozen=True)
class IrradianceProfile:
    """Half-sine clear-sky day."""

    peak: float = 1000.0            # W/m2
    daylight_hours: float = None
    solar_noon: float = 12.0        # h
    daily_target: float = 5.0       # kWh/m2/day

    def __post_init__(self):
        if self.daylight_hours is None:
            hours = (self.daily_target * 1000.0 * pi / (2.0 * self.peak)
                     if self.peak > 0 else 0.0)
            if hours > 24:
                raise InvalidInputError(
                    f"peak {self.peak} W/m2 cannot deliver {self.daily_target} "
                    "kWh/m2 within 24 h", "peak")
            object.__setattr__(self, "daylight_hours", hours)

    @classmethod
    def from_site(cls, site):
        p = site.profile
        return cls(peak=p.peak, daylight_hours=p.daylight_hours,
                   solar_noon=p.solar_noon, daily_target=site.irradiation)


def irradiance_at(profile, t):
    """Irradiance in W/m2 at ``t`` hours after midnight."""
    half = profile.daylight_hours / 2.0
    # Distance from noon on the 24 h circle, so windows may straddle midnight.
    x = (t - profile.solar_noon + 12.0) % 24.0 - 12.0
    if half <= 0 or abs(x) >= half:
        return 0.0
    return profile.peak * sin(pi * (x + half) / profile.daylight_hours)


@dataclass(frozen=True)
class BatteryState:
    state_of_charge: float
    capacity: float                 # Ah
    voltage: float                  # V
    soc_floor: float
    charge_efficiency: float = 1.0
    saturated: bool = False

    @property
    def energy_capacity(self):
        """Bank energy in Wh."""
        return self.capacity * self.voltage


def step_battery(state, net_power, dt):
    """Energy-counting update; ``net_power`` > 0 charges the battery.

    The result is clamped to [0, 1]; ``saturated`` marks a clamped step.
    """
    if not dt > 0:
        raise InvalidInputError("dt must be > 0", "dt")
    eta = state.charge_efficiency if net_power > 0 else 1.0
    soc = state.state_of_charge + eta * net_power * dt / (3600.0 * state.energy_capacity)
    clamped = min(1.0, max(0.0, soc))
    return replace(state, state_of_charge=clamped, saturated=clamped != soc)


@dataclass(frozen=True)
class MotorState:
    speed: float                    # rpm
    steady_gain: float              # rpm/V
    time_constant: float            # s

    def __post_init__(self):
        if self.speed < 0:
            raise InvalidInputError("speed must be >= 0", "speed")
        if not self.time_constant > 0:
            raise InvalidInputError("time_constant must be > 0", "time_constant")


def step_motor(state, bus_voltage, dt):
    if not dt > 0:
        raise InvalidInputError("dt must be > 0", "dt")
    target = state.steady_gain * bus_voltage
    gap = (state.speed - target) * exp(-dt / state.time_constant)
    # Snap once the gap is negligible so the speed never decays into subnormals.
    speed = target if abs(gap) < SPEED_SNAP_RPM else target + gap
    return replace(state, speed=max(speed, 0.0))


def scheduled_on_time(schedule, t0, t1):
    """Seconds of ``[t0, t1)`` (absolute clock seconds) inside a session."""
    total = 0.0
    if schedule.sessions_per_day == 0 or schedule.session_minutes == 0:
        return 0.0
    sessions = schedule.sessions_s()
    # A session that starts late in the day may run past midnight, so the
    # previous day is scanned too.
    for day in range(int(floor(t0 / DAY_S)) - 1, int(floor(t1 / DAY_S)) + 1):
        base = day * DAY_S
        for start, end in sessions:
            lo = max(t0, base + start)
            hi = min(t1, base + end)
            if hi > lo:
                total += hi - lo
    return total


@dataclass(frozen=True)
class SimTrace:
    """Columnar trace; record ``k`` is the state at the end of step ``k``.

    Powers in a record are averages over that step.
    """

    dt: float
    start: float
    initial_soc: float
    soc_floor: float
    battery_energy: float           # Wh
    total_reduction: float
    losses_wh: float                # charge-efficiency losses
    t_s: np.ndarray
    irradiance_wm2: np.ndarray
    pv_w: np.ndarray
    load_w: np.ndarray
    net_w: np.ndarray
    soc: np.ndarray
    motor_rpm: np.ndarray
    drum_rpm: np.ndarray
    saturated: np.ndarray

    def __len__(self):
        return len(self.t_s)

    def records(self):
        columns = [getattr(self, c) for c in TRACE_COLUMNS]
        for row in zip(*columns):
            yield SimRecord(*(float(v) for v in row))

    @property
    def pv_energy_wh(self):
        return float(np.sum(self.pv_w) * self.dt / 3600.0)

    @property
    def load_energy_wh(self):
        return float(np.sum(self.load_w) * self.dt / 3600.0)

    @property
    def min_soc(self):
        return float(min(self.initial_soc, np.min(self.soc)))

    @property
    def max_soc(self):
        return float(max(self.initial_soc, np.max(self.soc)))


def _validate(config):
    for section in ("drum", "motor", "gear", "pulleys", "schedule",
                    "pv_datasheet", "battery", "site"):
        if getattr(config, section, None) is None:
            raise ConfigError(f"config has no {section} section", section)


def simulate(config, horizon, dt=1.0, scenario="clear-days", start=0.0,
             initial_soc=None, module=None):
    """Run the chain for ``horizon`` seconds with a fixed step ``dt``.

    ``start`` is the clock time of ``t = 0`` in seconds after midnight.
    The ``blackout`` scenario forces zero irradiance and, unless
    ``initial_soc`` is given, starts from a full battery.  ``module`` lets
    callers reuse an already extracted :class:`PvModule`.
    """
    if not dt > 0:
        raise InvalidInputError("dt must be > 0", "dt")
    if not horizon >= dt:
        raise InvalidInputError("horizon must be >= dt", "horizon")
    if scenario not in SCENARIOS:
        raise InvalidInputError(f"scenario must be one of {SCENARIOS}", "scenario")
    _validate(config)

    design = size_drivetrain(config.drum, config.motor, config.gear,
                             config.pulleys, config.gravity)
    motor_power = motor_electrical_power(config.power_mode, config.motor, design)
    reduction = config.installed_reduction
    profile = IrradianceProfile.from_site(config.site)
    blackout = scenario == "blackout"
    if module is None and not blackout:
        module = PvModule(config.pv_datasheet, config.pv_ideality)
    temperature = config.site.cell_temperature
    hold = config.site.pv_update_interval
    bus_voltage = config.motor.voltage

    bat = config.battery
    if initial_soc is None:
        initial_soc = 1.0 if blackout else bat.initial_soc
    battery = BatteryState(state_of_charge=initial_soc, capacity=bat.bank_capacity,
                           voltage=bat.voltage, soc_floor=1.0 - bat.discharge_depth,
                           charge_efficiency=bat.charge_efficiency)
    motor = MotorState(speed=0.0, steady_gain=config.steady_gain,
                       time_constant=config.motor_dynamics.time_constant)
    e_bank_j = battery.energy_capacity * 3600.0

    n = int(round(horizon / dt))
    cols = {c: np.empty(n) for c in TRACE_COLUMNS}
    saturated = np.zeros(n, dtype=bool)
    losses_j = 0.0
    last_sample = None
    g = pv_avail = 0.0
    for k in range(n):
        clock = start + k * dt
        if not blackout:
            sample = floor(clock / hold) * hold
            if sample != last_sample:
                last_sample = sample
                g = irradiance_at(profile, (sample % DAY_S) / 3600.0)
                pv_avail = module.mpp(g, temperature).power

        frac = scheduled_on_time(config.schedule, clock, clock + dt) / dt
        demand = motor_power * frac
        soc = battery.state_of_charge
        charge_room = (1.0 - soc) * e_bank_j / (dt * battery.charge_efficiency)
        discharge_room = soc * e_bank_j / dt
        pv = min(pv_avail, demand + charge_room)
        load = min(demand, pv + discharge_room)
        net = pv - load
        if net > 0:
            losses_j += (1.0 - battery.charge_efficiency) * net * dt

        battery = step_battery(battery, net, dt)
        served = load / demand if demand > 0 else 1.0
        motor = step_motor(motor, bus_voltage * frac * served, dt)

        cols["t_s"][k] = (k + 1) * dt
        cols["irradiance_wm2"][k] = g
        cols["pv_w"][k] = pv
        cols["load_w"][k] = load
        cols["net_w"][k] = net
        cols["soc"][k] = battery.state_of_charge
        cols["motor_rpm"][k] = motor.speed
        cols["drum_rpm"][k] = motor.speed / reduction
        saturated[k] = battery.saturated or pv < pv_avail or load < demand

    return SimTrace(dt=dt, start=start, initial_soc=initial_soc,
                    soc_floor=battery.soc_floor,
                    battery_energy=battery.energy_capacity,
                    total_reduction=reduction, losses_wh=losses_j / 3600.0,
                    saturated=saturated, **cols)


@dataclass(frozen=True)
class AutonomyVerdict:
    passed: bool
    min_soc: float
    soc_floor: float
    days: int


def autonomy_check(config, days, dt=60.0):
    """Carry the duty schedule from a full battery with no sun for ``days``."""
    if not isinstance(days, int) or days < 1:
        raise InvalidInputError("days must be an integer >= 1", "days")
    trace = simulate(config, days * DAY_S, dt, scenario="blackout")
    return verdict_from_trace(trace, days)


def verdict_from_trace(trace, days):
    return AutonomyVerdict(passed=trace.min_soc >= trace.soc_floor,
                           min_soc=trace.min_soc, soc_floor=trace.soc_floor,
                           days=days)


def session_rise_time(trace, config, fraction=0.99):
    """Seconds from the first session start until the motor reaches
    ``fraction`` of its steady speed, or None if it never does."""
    sessions = config.schedule.sessions_s()
    if not sessions:
        return None
    target = fraction * config.steady_gain * config.motor.voltage
    t_end = trace.start + trace.t_s
    first_day = floor(trace.start / DAY_S)
    starts = sorted(first_day * DAY_S + d * DAY_S + s
                    for d in (0, 1) for s, _ in sessions)
    starts = [s for s in starts if s >= trace.start and s < t_end[-1]]
    if not starts:
        return None
    t0 = starts[0]
    hit = np.nonzero((t_end > t0) & (trace.motor_rpm >= target))[0]
    if len(hit) == 0:
        return None
    return float(t_end[hit[0]] - t0)
