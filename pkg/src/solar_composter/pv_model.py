"""Five-parameter single-diode model of a PV module.

The module current obeys the implicit equation::

    I = Iph - I0 * (exp((V + I Rs) / (n Ns Vt)) - 1) - (V + I Rs) / Rsh

Parameters are extracted from the four datasheet figures (Isc, Voc, and the
maximum power point with its zero-slope condition) with the ideality factor
held fixed.  For a given ideality and series resistance the three point
conditions are linear in ``(Iph, I0, 1/Rsh)``, which leaves a scalar root
search in ``Rs`` for the slope condition.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from math import exp, expm1, inf, log1p, sqrt

import numpy as np
from scipy.optimize import brentq

from .errors import ExtractionError, InvalidInputError, NumericFailureError

BOLTZMANN = 1.380649e-23      # J/K
ELEMENTARY_CHARGE = 1.602176634e-19
KELVIN = 273.15

DEFAULT_IDEALITY = 1.3
IDEALITY_RANGE = (0.8, 2.5)
CURRENT_TOL = 1e-10           # A, diode equation residual
MPP_VOLTAGE_TOL = 1e-4        # V, golden-section bracket width
# Temperature rise at which the band gap is matched to the datasheet Voc slope.
BAND_GAP_CAL_DT = 25.0

_INVPHI = (sqrt(5.0) - 1.0) / 2.0


def thermal_voltage(temperature_c):
    return BOLTZMANN * (temperature_c + KELVIN) / ELEMENTARY_CHARGE


@dataclass(frozen=True)
class PvDatasheet:
    open_circuit_voltage: float = 21.3
    short_circuit_current: float = 1.31
    mpp_voltage: float = 17.1
    mpp_current: float = 1.17
    series_cells: int = 36
    temp_coeff_isc: float = 0.0005    # 1/degC
    temp_coeff_voc: float = -0.0045   # 1/degC
    reference_irradiance: float = 1000.0
    reference_temperature: float = 25.0

    def __post_init__(self):
        if not isinstance(self.series_cells, int) or self.series_cells < 1:
            raise InvalidInputError("series_cells must be an integer >= 1",
                                    "series_cells")
        for name in ("open_circuit_voltage", "short_circuit_current",
                     "mpp_voltage", "mpp_current", "reference_irradiance"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be > 0", name)

    @property
    def peak_power(self):
        return self.mpp_voltage * self.mpp_current


@dataclass(frozen=True)
class SingleDiodeParams:
    photocurrent: float          # A
    saturation_current: float    # A
    ideality: float
    series_resistance: float     # ohm
    shunt_resistance: float      # ohm, inf for a dark module
    series_cells: int = 36
    temperature: float = 25.0    # degC, sets the thermal voltage

    def __post_init__(self):
        if self.photocurrent < 0:
            raise InvalidInputError("photocurrent must be >= 0", "photocurrent")
        if not self.saturation_current > 0:
            raise InvalidInputError("saturation_current must be > 0",
                                    "saturation_current")
        if self.series_resistance < 0:
            raise InvalidInputError("series_resistance must be >= 0",
                                    "series_resistance")
        if not self.shunt_resistance > self.series_resistance:
            raise InvalidInputError("shunt_resistance must exceed "
                                    "series_resistance", "shunt_resistance")

    @property
    def modified_ideality(self):
        """``n * Ns * Vt`` in volts."""
        return self.ideality * self.series_cells * thermal_voltage(self.temperature)


@dataclass(frozen=True)
class OperatingPoint:
    voltage: float
    current: float
    power: float

    @classmethod
    def at(cls, voltage, current):
        return cls(voltage, current, voltage * current)


@dataclass(frozen=True)
class IvCurve:
    irradiance: float
    temperature: float
    points: tuple

    def max_power_point(self):
        return max(self.points, key=lambda p: p.power)


def _residual(params, voltage, current):
    a = params.modified_ideality
    vd = voltage + current * params.series_resistance
    return (params.photocurrent
            - params.saturation_current * expm1(vd / a)
            - vd / params.shunt_resistance
            - current)


def current_at(params, voltage):
    """Module current at ``voltage``, solved with Brent's bracketing method.

    The residual is strictly decreasing in the current, so the initial
    bracket is widened until it changes sign.
    """
    lo = -0.1 * params.photocurrent - 1e-3
    hi = 1.1 * params.photocurrent + 1e-3
    f = lambda i: _residual(params, voltage, i)  # noqa: E731
    for _ in range(200):
        if f(lo) < 0:
            lo = 2.0 * lo - hi
        elif f(hi) > 0:
            hi = 2.0 * hi - lo
        else:
            break
    else:
        raise NumericFailureError(f"no current bracket at V={voltage}")
    if f(lo) == 0:
        return lo
    try:
        current = float(brentq(f, lo, hi, xtol=1e-15,
                               rtol=4 * np.finfo(float).eps, maxiter=500))
    except (RuntimeError, ValueError) as exc:
        raise NumericFailureError(f"diode solve failed at V={voltage}: {exc}") from exc
    if abs(f(current)) > CURRENT_TOL:
        raise NumericFailureError(
            f"diode residual {f(current):.3e} A at V={voltage} exceeds tolerance")
    return current


def open_circuit_voltage(params):
    if params.photocurrent == 0:
        return 0.0
    a = params.modified_ideality
    f = lambda v: (params.photocurrent  # noqa: E731
                   - params.saturation_current * expm1(v / a)
                   - v / params.shunt_resistance)
    hi = a * log1p(params.photocurrent / params.saturation_current) * 1.01 + 1e-9
    return float(brentq(f, 0.0, hi, xtol=1e-13, maxiter=500))


def _point_conditions(sheet, ideality, rs):
    """Solve the three point conditions for ``(Iph, I0, 1/Rsh)`` given Rs."""
    a = ideality * sheet.series_cells * thermal_voltage(sheet.reference_temperature)
    isc, voc = sheet.short_circuit_current, sheet.open_circuit_voltage
    vmp, imp = sheet.mpp_voltage, sheet.mpp_current
    # Row i: Iph - I0 * expm1(vd_i / a) - G * vd_i = I_i
    vd = np.array([isc * rs, voc, vmp + imp * rs])
    lhs = np.column_stack([np.ones(3), -np.expm1(vd / a), -vd])
    rhs = np.array([isc, 0.0, imp])
    # Scale the I0 column; expm1(Voc/a) is ~1e7 while the others are O(1).
    scale = float(np.abs(lhs[:, 1]).max())
    lhs[:, 1] /= scale
    iph, i0, g = (float(x) for x in np.linalg.solve(lhs, rhs))
    return iph, i0 / scale, g, a


def _slope_residual(sheet, ideality, rs):
    """``dP/dV`` at the datasheet MPP, normalised by Imp."""
    iph, i0, g, a = _point_conditions(sheet, ideality, rs)
    vmp, imp = sheet.mpp_voltage, sheet.mpp_current
    gd = i0 / a * exp((vmp + imp * rs) / a) + g
    didv = -gd / (1.0 + rs * gd)
    return float((imp + vmp * didv) / imp)


def _extract_at(sheet, ideality):
    rs_max = (sheet.open_circuit_voltage - sheet.mpp_voltage) / sheet.mpp_current
    grid = np.linspace(0.0, rs_max * (1 - 1e-9), 400)
    values = [_slope_residual(sheet, ideality, rs) for rs in grid]
    for k in range(len(grid) - 1):
        if values[k] == 0 or values[k] * values[k + 1] < 0:
            rs = float(brentq(lambda x: _slope_residual(sheet, ideality, x),
                              grid[k], grid[k + 1], xtol=1e-15, maxiter=500))
            iph, i0, g, _ = _point_conditions(sheet, ideality, rs)
            if iph > 0 and i0 > 0 and g > 0 and 1.0 / g > rs:
                return SingleDiodeParams(
                    photocurrent=iph, saturation_current=i0, ideality=ideality,
                    series_resistance=rs, shunt_resistance=1.0 / g,
                    series_cells=sheet.series_cells,
                    temperature=sheet.reference_temperature)
    return None


def datasheet_residuals(params, sheet):
    """Relative misfit of the model against each datasheet condition."""
    isc, voc = sheet.short_circuit_current, sheet.open_circuit_voltage
    vmp, imp = sheet.mpp_voltage, sheet.mpp_current
    i_mp = current_at(params, vmp)
    rs = params.series_resistance
    a = params.modified_ideality
    gd = (params.saturation_current / a * exp((vmp + i_mp * rs) / a)
          + 1.0 / params.shunt_resistance)
    dpdv = i_mp - vmp * gd / (1.0 + rs * gd)
    return {
        "isc": abs(current_at(params, 0.0) - isc) / isc,
        "voc": abs(current_at(params, voc)) / isc,
        "imp": abs(i_mp - imp) / imp,
        "dpdv": abs(dpdv) / imp,
    }


def extract_parameters(sheet, ideality=DEFAULT_IDEALITY, tol=1e-6):
    """Fit the five single-diode parameters to a datasheet.

    The requested ideality is tried first; if it admits no physical
    solution, nearby values inside ``IDEALITY_RANGE`` are tried in order of
    distance from it.
    """
    if not sheet.mpp_voltage < sheet.open_circuit_voltage:
        raise ExtractionError("mpp_voltage must be below open_circuit_voltage")
    if not sheet.mpp_current < sheet.short_circuit_current:
        raise ExtractionError("mpp_current must be below short_circuit_current")
    if sheet.peak_power >= sheet.open_circuit_voltage * sheet.short_circuit_current:
        raise ExtractionError("fill factor must be below one")

    lo, hi = IDEALITY_RANGE
    candidates = [ideality] + sorted(
        (n for n in np.round(np.arange(lo, hi + 1e-9, 0.05), 2) if n != ideality),
        key=lambda n: abs(n - ideality))
    residuals = {}
    for n in candidates:
        params = _extract_at(sheet, float(n))
        if params is None:
            continue
        residuals = datasheet_residuals(params, sheet)
        if max(residuals.values()) <= tol:
            return params
    raise ExtractionError("no single-diode parameters satisfy the datasheet",
                          residuals)


def _voc_at(params, sheet, band_gap, temperature):
    return open_circuit_voltage(
        _translate(params, sheet, sheet.reference_irradiance, temperature, band_gap))


@lru_cache(maxsize=64)
def band_gap_for(params, sheet):
    """Band gap (eV) making the model's Voc slope match ``temp_coeff_voc``."""
    t_cal = sheet.reference_temperature + BAND_GAP_CAL_DT
    target = sheet.open_circuit_voltage * (1 + sheet.temp_coeff_voc * BAND_GAP_CAL_DT)
    f = lambda eg: _voc_at(params, sheet, eg, t_cal) - target  # noqa: E731
    try:
        return float(brentq(f, 0.05, 5.0, xtol=1e-12))
    except ValueError as exc:
        raise ExtractionError(
            f"temp_coeff_voc={sheet.temp_coeff_voc} cannot be matched by any "
            "band gap in [0.05, 5] eV") from exc


def _translate(params, sheet, irradiance, temperature, band_gap):
    t_ref = sheet.reference_temperature + KELVIN
    t = temperature + KELVIN
    ratio = irradiance / sheet.reference_irradiance
    iph = params.photocurrent * ratio * (
        1 + sheet.temp_coeff_isc * (temperature - sheet.reference_temperature))
    i0 = (params.saturation_current * (t / t_ref) ** 3
          * exp(band_gap / (params.ideality * BOLTZMANN / ELEMENTARY_CHARGE)
                * (1.0 / t_ref - 1.0 / t)))
    rsh = params.shunt_resistance / ratio if ratio > 0 else inf
    return replace(params, photocurrent=max(iph, 0.0), saturation_current=i0,
                   shunt_resistance=rsh, temperature=temperature)


def translate_conditions(params, sheet, irradiance, temperature):
    """Move reference-condition parameters to ``(irradiance, temperature)``.

    Photocurrent scales linearly with irradiance and with the Isc
    temperature coefficient; the saturation current follows the cubic diode
    law with a band-gap exponential; shunt resistance scales inversely with
    irradiance; series resistance and ideality are unchanged.
    """
    if irradiance < 0:
        raise InvalidInputError("irradiance must be >= 0", "irradiance")
    if (irradiance == sheet.reference_irradiance
            and temperature == sheet.reference_temperature):
        return params
    return _translate(params, sheet, irradiance, temperature,
                      band_gap_for(params, sheet))


def power_at(params, voltage):
    return voltage * current_at(params, voltage)


def golden_section_max(f, lo, hi, tol=MPP_VOLTAGE_TOL):
    """Maximiser of a unimodal ``f`` on ``[lo, hi]`` to bracket width ``tol``."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def max_power_point(params):
    """MPP of a model already at its operating conditions."""
    if params.photocurrent == 0:
        return OperatingPoint(0.0, 0.0, 0.0)
    voc = open_circuit_voltage(params)
    v = golden_section_max(lambda x: power_at(params, x), 0.0, voc)
    return OperatingPoint.at(v, current_at(params, v))


def mpp(params, sheet, irradiance, temperature):
    if irradiance < 0:
        raise InvalidInputError("irradiance must be >= 0", "irradiance")
    if irradiance == 0:
        return OperatingPoint(0.0, 0.0, 0.0)
    return max_power_point(translate_conditions(params, sheet, irradiance, temperature))


def sweep(params, sheet, irradiance, temperature, point_count):
    """I-V curve at uniformly spaced voltages from 0 to Voc."""
    if not isinstance(point_count, int) or point_count < 2:
        raise InvalidInputError("point_count must be an integer >= 2",
                                "point_count")
    if irradiance <= 0:
        raise InvalidInputError("a dark module has no I-V curve to sweep",
                                "irradiance")
    local = translate_conditions(params, sheet, irradiance, temperature)
    voc = open_circuit_voltage(local)
    points = []
    for k in range(point_count):
        v = voc * k / (point_count - 1)
        points.append(OperatingPoint.at(v, current_at(local, v)))
    return IvCurve(irradiance=irradiance, temperature=temperature,
                   points=tuple(points))


class PvModule:
    """A datasheet with its extracted parameters and a memoised MPP lookup."""

    def __init__(self, sheet, ideality=DEFAULT_IDEALITY):
        self.sheet = sheet
        self.params = extract_parameters(sheet, ideality)
        self._mpp = lru_cache(maxsize=4096)(self._mpp_uncached)

    def _mpp_uncached(self, irradiance, temperature):
        return mpp(self.params, self.sheet, irradiance, temperature)

    def mpp(self, irradiance, temperature):
        return self._mpp(float(irradiance), float(temperature))

    def sweep(self, irradiance, temperature, point_count):
        return sweep(self.params, self.sheet, irradiance, temperature, point_count)
