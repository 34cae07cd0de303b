"""Mechanical drive chain of the rotary drum.

Load torque at the drum, the motor torque needed through the reduction
chain, per-stage reduction factors and open-belt pulley geometry.

Every reduction factor here is ``input speed / output speed`` and is
therefore >= 1 for a reducing stage.  Pulley dimensions are in millimetres,
everything else is SI except rotational speeds, which are in rpm.
"""

from dataclasses import dataclass
from math import asin, isfinite, pi, sqrt

from .errors import (
    GeometryInfeasibleError,
    InfeasibleSplitError,
    InvalidInputError,
    ReductionInfeasibleError,
)

GRAVITY = 9.81
RPM_TO_RAD_S = 2.0 * pi / 60.0

# Relative slack used when checking total >= stage reduction after floating
# point division.
_SPLIT_RTOL = 1e-12


def _require(condition, message, field=None):
    if not condition:
        raise InvalidInputError(message, field)


def _finite(value, field):
    _require(isinstance(value, (int, float)) and isfinite(value),
             f"{field} must be a finite number, got {value!r}", field)


@dataclass(frozen=True)
class DrumSpec:
    """The rotating drum, i.e. the load."""

    diameter: float = 0.600          # m
    length: float = 0.640            # m
    capacity: float = 0.181          # m^3
    empty_mass: float = 10.48        # kg
    waste_mass: float = 20.0         # kg
    target_speed: float = 4.0        # rpm

    def __post_init__(self):
        for name in ("diameter", "length", "capacity", "empty_mass",
                     "waste_mass", "target_speed"):
            _finite(getattr(self, name), name)
        for name in ("diameter", "length", "capacity", "target_speed"):
            _require(getattr(self, name) > 0, f"{name} must be > 0", name)
        for name in ("empty_mass", "waste_mass"):
            _require(getattr(self, name) >= 0, f"{name} must be >= 0", name)

    @property
    def radius(self):
        return self.diameter / 2.0

    @property
    def total_mass(self):
        return self.empty_mass + self.waste_mass


@dataclass(frozen=True)
class MotorSpec:
    rated_speed: float = 1500.0      # rpm
    rated_torque: float = 2.74       # N.m
    efficiency: float = 0.98
    voltage: float = 12.0            # V

    def __post_init__(self):
        for name in ("rated_speed", "rated_torque", "efficiency", "voltage"):
            _finite(getattr(self, name), name)
            _require(getattr(self, name) > 0, f"{name} must be > 0", name)
        _require(self.efficiency <= 1, "efficiency must be <= 1", "efficiency")


@dataclass(frozen=True)
class GearStage:
    reduction_factor: float = 39.27
    efficiency: float = 0.85

    def __post_init__(self):
        _finite(self.reduction_factor, "reduction_factor")
        _finite(self.efficiency, "efficiency")
        _require(self.reduction_factor >= 1, "reduction_factor must be >= 1",
                 "reduction_factor")
        _require(0 < self.efficiency <= 1, "efficiency must be in (0, 1]",
                 "efficiency")


@dataclass(frozen=True)
class PulleyPair:
    drive_diameter: float = 15.0     # mm, motor side
    driven_diameter: float = 143.24  # mm
    center_distance: float = 110.0   # mm
    efficiency: float = 1.0

    def __post_init__(self):
        for name in ("drive_diameter", "driven_diameter", "center_distance",
                     "efficiency"):
            _finite(getattr(self, name), name)
            _require(getattr(self, name) > 0, f"{name} must be > 0", name)
        _require(self.efficiency <= 1, "efficiency must be <= 1", "efficiency")

    @property
    def reduction_factor(self):
        return self.driven_diameter / self.drive_diameter


@dataclass(frozen=True)
class WrapGeometry:
    beta: float          # rad
    theta_small: float   # rad, wrap on the drive pulley
    theta_large: float   # rad, wrap on the driven pulley
    belt_length: float   # mm
    center_valid: bool


@dataclass(frozen=True)
class DrivetrainDesign:
    load_torque: float              # N.m at the drum
    total_reduction: float          # motor speed / drum speed
    gear_reduction: float           # share of the total left for the gearbox
    pulley_reduction: float         # driven / drive diameter
    required_motor_torque: float    # N.m
    wrap: WrapGeometry
    margin_ok: bool
    drum_speed: float               # rpm
    chain_efficiency: float         # motor x gearbox


def load_torque(total_mass, drum_radius, gravity=GRAVITY):
    """Torque needed at the drum shaft, ``M_T * g * r``.

    The drum is taken to turn at the gearbox output speed, so the power
    balance between drum and gearbox reduces to this product.
    """
    _require(total_mass >= 0, "total_mass must be >= 0", "total_mass")
    _require(drum_radius > 0, "drum_radius must be > 0", "drum_radius")
    _require(gravity > 0, "gravity must be > 0", "gravity")
    return total_mass * gravity * drum_radius


def required_motor_torque(load_torque, total_reduction, eta_motor, eta_gear):
    _require(load_torque >= 0, "load_torque must be >= 0", "load_torque")
    _require(total_reduction >= 1, "total_reduction must be >= 1",
             "total_reduction")
    _require(0 < eta_motor <= 1, "eta_motor must be in (0, 1]", "eta_motor")
    _require(0 < eta_gear <= 1, "eta_gear must be in (0, 1]", "eta_gear")
    return load_torque / (total_reduction * eta_motor * eta_gear)


def total_reduction(motor_speed, drum_speed):
    _require(drum_speed > 0, "drum_speed must be > 0", "drum_speed")
    _require(motor_speed > 0, "motor_speed must be > 0", "motor_speed")
    if motor_speed < drum_speed:
        raise ReductionInfeasibleError(
            f"motor speed {motor_speed} rpm is below drum speed {drum_speed} rpm")
    return motor_speed / drum_speed


def gear_stage_ratio(total_reduction, pulley_reduction):
    """Reduction the gearbox must supply once the belt stage is fixed."""
    _require(pulley_reduction >= 1, "pulley_reduction must be >= 1",
             "pulley_reduction")
    if pulley_reduction > total_reduction * (1 + _SPLIT_RTOL):
        raise InfeasibleSplitError(
            f"pulley reduction {pulley_reduction:g} exceeds total "
            f"reduction {total_reduction:g}")
    return max(total_reduction / pulley_reduction, 1.0)


def pulley_geometry(pair):
    """Wrap angles and length of an open belt over two pulleys.

    ``center_valid`` reports the centre-distance rule
    ``d_driven < C < 3 (d_drive + d_driven)``; violating it is a finding,
    not an error.
    """
    d_m = pair.drive_diameter
    d_r = pair.driven_diameter
    c = pair.center_distance
    s = (d_r - d_m) / (2.0 * c)
    if not -1.0 < s < 1.0:
        raise GeometryInfeasibleError(
            f"|{d_r} - {d_m}| must be below twice the centre distance {c}")
    beta = asin(s)
    theta_small = pi - 2.0 * beta
    theta_large = pi + 2.0 * beta
    length = (sqrt(4.0 * c * c - (d_r - d_m) ** 2)
              + 0.5 * (d_m * theta_small + d_r * theta_large))
    return WrapGeometry(
        beta=beta,
        theta_small=theta_small,
        theta_large=theta_large,
        belt_length=length,
        center_valid=d_r < c < 3.0 * (d_m + d_r),
    )


def chain_output_power(motor_power, eta_gear, eta_pulley, paper_faithful=False):
    """Power delivered to the drum and whether the figure is physical.

    With ``paper_faithful`` the literal ``P_m / (eta_r * eta_p)`` form is
    evaluated, which exceeds the input for any efficiency below one.
    Returns ``(power, nonphysical)``.
    """
    _require(motor_power >= 0, "motor_power must be >= 0", "motor_power")
    _require(0 < eta_gear <= 1, "eta_gear must be in (0, 1]", "eta_gear")
    _require(0 < eta_pulley <= 1, "eta_pulley must be in (0, 1]", "eta_pulley")
    eta = eta_gear * eta_pulley
    if paper_faithful:
        power = motor_power / eta
        return power, power > motor_power
    return motor_power * eta, False


def size_drivetrain(drum, motor, gear, pulleys, gravity=GRAVITY):
    torque = load_torque(drum.total_mass, drum.radius, gravity)
    total = total_reduction(motor.rated_speed, drum.target_speed)
    pulley_k = pulleys.reduction_factor
    if pulley_k < 1:
        raise InfeasibleSplitError(
            f"belt stage speeds up the drive (driven {pulleys.driven_diameter} mm"
            f" < drive {pulleys.drive_diameter} mm)")
    gear_k = gear_stage_ratio(total, pulley_k)
    required = required_motor_torque(torque, gear_k, motor.efficiency,
                                     gear.efficiency)
    return DrivetrainDesign(
        load_torque=torque,
        total_reduction=total,
        gear_reduction=gear_k,
        pulley_reduction=pulley_k,
        required_motor_torque=required,
        wrap=pulley_geometry(pulleys),
        margin_ok=motor.rated_torque >= required,
        drum_speed=drum.target_speed,
        chain_efficiency=motor.efficiency * gear.efficiency,
    )
