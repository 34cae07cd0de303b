from dataclasses import replace

import numpy as np
import pytest

from conftest import lambertw_current
from solar_composter.errors import ExtractionError, InvalidInputError
from solar_composter.pv_model import (
    IDEALITY_RANGE,
    PvDatasheet,
    current_at,
    datasheet_residuals,
    extract_parameters,
    mpp,
    open_circuit_voltage,
    sweep,
    translate_conditions,
)


def lambert_power_slope(p, v, h=1e-4):
    power = lambda x: x * lambertw_current(p, x)  # noqa: E731
    return (power(v + h) - power(v - h)) / (2 * h)


def test_extraction_reproduces_datasheet(params, sheet):
    assert lambertw_current(params, 0.0) == pytest.approx(sheet.short_circuit_current, rel=1e-6)
    assert abs(lambertw_current(params, sheet.open_circuit_voltage)) <= 1e-6 * sheet.short_circuit_current
    assert lambertw_current(params, sheet.mpp_voltage) == pytest.approx(sheet.mpp_current, rel=1e-6)
    assert abs(lambert_power_slope(params, sheet.mpp_voltage)) <= 1e-6 * sheet.mpp_current


def test_extracted_params_are_physical(params):
    assert params.photocurrent > 0
    assert params.saturation_current > 0
    assert IDEALITY_RANGE[0] <= params.ideality <= IDEALITY_RANGE[1]
    assert params.ideality == 1.3
    assert 0 <= params.series_resistance < params.shunt_resistance


def test_internal_residuals_agree(params, sheet):
    assert max(datasheet_residuals(params, sheet).values()) <= 1e-6


@pytest.mark.parametrize("kwargs", [
    {"mpp_voltage": 21.3}, {"mpp_voltage": 22.0}, {"mpp_current": 1.31},
])
def test_degenerate_sheet_fails(kwargs):
    with pytest.raises(ExtractionError):
        extract_parameters(replace(PvDatasheet(), **kwargs))


def test_extraction_generalises_to_other_module():
    sheet = PvDatasheet(open_circuit_voltage=37.8, short_circuit_current=8.8,
                        mpp_voltage=30.6, mpp_current=8.2, series_cells=60)
    params = extract_parameters(sheet)
    assert max(datasheet_residuals(params, sheet).values()) <= 1e-6


@pytest.mark.parametrize("v,expected", [(0.0, 1.31), (17.1, 1.17)])
def test_current_at_datasheet_points(params, v, expected):
    assert current_at(params, v) == pytest.approx(expected, rel=1e-6)


def test_current_at_open_circuit(params):
    assert abs(current_at(params, 21.3)) <= 1e-6


def test_current_at_matches_lambertw(params):
    v = np.linspace(0, 22, 441)
    ours = np.array([current_at(params, x) for x in v])
    assert np.max(np.abs(ours - lambertw_current(params, v))) < 1e-9


def test_translate_identity(params, sheet):
    assert translate_conditions(params, sheet, 1000, 25) == params


def test_translate_halves_photocurrent(params, sheet):
    half = translate_conditions(params, sheet, 500, 25)
    assert half.photocurrent == params.photocurrent / 2
    assert half.shunt_resistance == pytest.approx(2 * params.shunt_resistance)
    assert half.series_resistance == params.series_resistance


def test_translate_hot_lowers_voc(params, sheet):
    hot = translate_conditions(params, sheet, 1000, 45)
    voc_hot = open_circuit_voltage(hot)
    assert voc_hot < open_circuit_voltage(params)
    # Band gap is matched to the datasheet slope at +25 K, so 20 K lands close.
    expected = 21.3 * (1 + sheet.temp_coeff_voc * 20)
    assert voc_hot == pytest.approx(expected, rel=5e-3)


def test_translate_rejects_negative_irradiance(params, sheet):
    with pytest.raises(InvalidInputError):
        translate_conditions(params, sheet, -1, 25)


def test_mpp_stc(params, sheet):
    point = mpp(params, sheet, 1000, 25)
    assert point.power == pytest.approx(20.01, rel=0.02)
    assert point.voltage == pytest.approx(17.10, abs=0.3)
    assert point.current == pytest.approx(1.170, rel=0.02)
    assert point.power == pytest.approx(point.voltage * point.current, rel=1e-12)


def test_mpp_hot(params, sheet):
    hot = mpp(params, sheet, 1000, 45)
    assert hot.power == pytest.approx(18.26, rel=0.05)
    assert hot.power < mpp(params, sheet, 1000, 25).power


def test_mpp_dark(params, sheet):
    point = mpp(params, sheet, 0, 25)
    assert (point.voltage, point.current, point.power) == (0, 0, 0)


def test_sweep_endpoints(params, sheet):
    curve = sweep(params, sheet, 1000, 25, 3)
    v = [p.voltage for p in curve.points]
    i = [p.current for p in curve.points]
    assert v[0] == 0 and v[1] == pytest.approx(21.3 / 2) and v[2] == pytest.approx(21.3)
    assert i[0] == pytest.approx(1.31, rel=1e-6)
    assert i[0] > i[1] > 0
    assert abs(i[2]) < 1e-6


def test_sweep_800(params, sheet):
    curve = sweep(params, sheet, 800, 25, 200)
    assert curve.max_power_point().power == pytest.approx(14.73, rel=0.10)


def test_sweep_rejects_few_points(params, sheet):
    with pytest.raises(InvalidInputError):
        sweep(params, sheet, 1000, 25, 1)


@pytest.mark.parametrize("g,t", [(1000, 25), (800, 25), (200, 25), (1000, 45), (600, 60)])
def test_sweep_never_beats_mpp(params, sheet, g, t):
    curve = sweep(params, sheet, g, t, 500)
    assert curve.max_power_point().power <= mpp(params, sheet, g, t).power + 1e-6


def test_mpp_beats_neighbours_on_1000_point_sweep(params, sheet):
    point = mpp(params, sheet, 1000, 25)
    curve = sweep(params, sheet, 1000, 25, 1000)
    v = np.array([p.voltage for p in curve.points])
    k = np.searchsorted(v, point.voltage)
    for j in (k - 1, k):
        assert point.power >= curve.points[j].power


@pytest.mark.parametrize("g,t", [(1000, 25), (800, 25), (1000, 45), (200, 25)])
def test_iv_strictly_decreasing_single_peak(params, sheet, g, t):
    curve = sweep(params, sheet, g, t, 1000)
    i = np.array([p.current for p in curve.points])
    p = np.array([pt.power for pt in curve.points])
    assert np.all(np.diff(i) < 0)
    dp = np.diff(p)
    rises = dp > 1e-9
    falls = dp < -1e-9
    peak = np.argmax(p)
    assert not rises[peak:].any() and not falls[:max(peak - 1, 0)].any()


def test_mpp_monotone_in_irradiance(params, sheet):
    powers = [mpp(params, sheet, g, 25).power for g in (200, 400, 600, 800, 1000)]
    assert all(a <= b for a, b in zip(powers, powers[1:]))


@pytest.mark.parametrize("g,t", [(1000, 25), (800, 25), (1000, 45)])
def test_golden_section_matches_brute_force(params, sheet, g, t):
    local = translate_conditions(params, sheet, g, t)
    voc = open_circuit_voltage(local)
    v = np.linspace(0, voc, 100_000)
    brute = v[np.argmax(v * lambertw_current(local, v))]
    assert mpp(params, sheet, g, t).voltage == pytest.approx(brute, abs=1e-3)
