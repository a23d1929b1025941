import math

import mpmath as mp
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from mosfa.molecule import MoleculeModel
from mosfa.pulse_yield import (PulseSpec, RateTable, YieldCurve, closing_field, envelope,
                               focal_average, focal_weight, pulse_yield, ratio_from_curves,
                               ratio_scan, threshold_limit, total_rate, yield_curve)
from mosfa.sfa_rates import channel_rate, min_open_channel, ratio_exact
from mosfa.units import derive_params, intensity_to_field, laser_from_lab, wavelength_to_omega

OMEGA = wavelength_to_omega(800)
H2 = MoleculeModel(1.4, 0.6045)


@pytest.fixture(scope="module")
def table_1e14():
    return RateTable.build(OMEGA, H2, intensity_to_field(1e14))


# ----------------------------------------------------------------- pulse

def test_envelope_examples():
    p = PulseSpec(0.05, OMEGA, 10)
    T = p.duration
    assert T == pytest.approx(10 * 2 * math.pi / OMEGA)
    assert envelope(0.0, p) == 0.05
    assert envelope(T / 2, p) == pytest.approx(0.0, abs=1e-18)
    assert envelope(-T / 2, p) == pytest.approx(0.0, abs=1e-18)
    assert envelope(T / 4, p) == pytest.approx(0.025, rel=1e-14)
    assert envelope(0.6 * T, p) == 0.0
    t = np.linspace(-T, T, 1001)
    e = envelope(t, p)
    assert np.all((e >= 0) & (e <= 0.05)) and np.allclose(e, e[::-1])


def test_pulse_spec_validation():
    with pytest.raises(ValueError):
        PulseSpec(0.05, OMEGA, 0)
    with pytest.raises(ValueError):
        PulseSpec(-0.05, OMEGA)
    p = PulseSpec.from_laser(laser_from_lab(800, 1e14))
    assert p.peak_intensity == pytest.approx(1e14, rel=1e-14)


def test_zero_field():
    assert pulse_yield(H2, PulseSpec(0.0, OMEGA)) == 0.0


@given(st.floats(1e-8, 1e-1))
def test_constant_rate_closed_form(g):
    p = PulseSpec(0.05, OMEGA, 10)
    # the rate is switched on wherever the envelope is nonzero, i.e. the whole pulse
    y = pulse_yield(H2, p, rate=lambda f: g if f > 0 else 0.0)
    assert y == pytest.approx(-math.expm1(-g * p.duration), rel=1e-10)


def test_peak_coulomb_mode():
    p = PulseSpec(0.05, OMEGA, 4)
    g = 1e-5
    y = pulse_yield(H2, p, rate=lambda f: g, coulomb="peak")
    expo = 2 / H2.kappa
    ref = quad(lambda t: g * math.cos(math.pi * t / p.duration) ** (2 * expo),
               -p.duration / 2, p.duration / 2, epsabs=0, epsrel=1e-12)[0]
    assert y == pytest.approx(-math.expm1(-ref), rel=1e-8)
    with pytest.raises(ValueError):
        pulse_yield(H2, p, rate=lambda f: g, coulomb="instant")


def test_small_rate_regime(table_1e14):
    p = PulseSpec(intensity_to_field(5e13), OMEGA)
    area = quad(lambda t: table_1e14(envelope(t, p)), -p.duration / 2, p.duration / 2,
                epsrel=1e-9, limit=500)[0]
    assert area < 1e-2
    assert pulse_yield(H2, p, rate=table_1e14) == pytest.approx(area, rel=5e-3)


def test_envelope_reflection(table_1e14):
    # the implementation integrates t >= 0 and doubles; compare with the full pulse
    p = PulseSpec(intensity_to_field(8e13), OMEGA)
    full = quad(lambda t: table_1e14(envelope(t, p)), -p.duration / 2, p.duration / 2,
                epsrel=1e-10, limit=1000)[0]
    assert pulse_yield(H2, p, rate=table_1e14) == pytest.approx(-math.expm1(-full), rel=1e-6)


def test_yield_monotone_and_bounded(table_1e14):
    grid = np.geomspace(1e13, 1e14, 12)
    curve = yield_curve(grid, H2, OMEGA, table=table_1e14)
    assert np.all(np.diff(curve.yields) > 0)
    assert np.all((curve.yields >= 0) & (curve.yields <= 1))


def test_saturation():
    y = pulse_yield(H2, PulseSpec(0.05, OMEGA), rate=lambda f: 10.0)
    assert y == 1.0


# -------------------------------------------------------------- rate table

def test_rate_table_against_direct(table_1e14):
    f0 = intensity_to_field(1e14)
    for f in np.linspace(f0 / 3, f0, 9):
        assert table_1e14(f) == pytest.approx(total_rate(f, OMEGA, H2), rel=1e-2)
    assert table_1e14(0.0) == 0.0
    with pytest.raises(ValueError):
        table_1e14(1.01 * f0)


def test_rate_table_grid_doubling(table_1e14):
    fine = RateTable.build(OMEGA, H2, intensity_to_field(1e14), n_points=128)
    p = PulseSpec(intensity_to_field(1e14), OMEGA)
    a = pulse_yield(H2, p, rate=table_1e14)
    b = pulse_yield(H2, p, rate=fine)
    assert abs(a / b - 1) < 5e-3


def test_threshold_limit_matches_rates():
    for n in (15, 16):
        fc = closing_field(n, OMEGA, H2.e_ion)
        f = fc * (1 - 1e-7)
        laser = derive_params(f, OMEGA)
        k = math.sqrt(2 * (n * OMEGA - laser.up - H2.e_ion))
        p = 1 if n % 2 == 0 else 3
        assert channel_rate(n, laser, H2) / k**p == pytest.approx(
            threshold_limit(n, derive_params(fc, OMEGA), H2), rel=1e-4)


def test_rate_table_validation():
    with pytest.raises(ValueError):
        RateTable.build(OMEGA, H2, 0.01, 0.02)


# ---------------------------------------------------------------- focal

def test_focal_weight():
    assert focal_weight(1e14, 1e14) == 0.0
    w = focal_weight(np.geomspace(1e10, 0.999e14, 50), 1e14)
    assert np.all(w > 0)
    for bad in (0.0, -1.0, 1.1e14):
        with pytest.raises(ValueError):
            focal_weight(bad, 1e14)


def volume_closed_form(fraction):
    # symbolic integral of the weight in x = I / I0 from the cutoff to 1
    x, a = sp.symbols("x a", positive=True)
    expr = sp.integrate(x ** sp.Rational(-5, 2) * sp.sqrt(1 - x) * (1 + 2 * x), (x, a, 1))
    return float(sp.N(expr.subs(a, sp.Rational(fraction).limit_denominator(10**12)), 30))


@pytest.mark.parametrize("fraction", [0.01, 0.05, 0.3])
def test_constant_yield_volume(fraction):
    i0 = 2e14
    c = 0.37
    s = focal_average(lambda i: c, i0, fraction * i0)
    assert s == pytest.approx(c * volume_closed_form(fraction), rel=1e-9)


def power_law_oracle(q, i0, fraction):
    xm = mp.mpf(fraction)
    b = mp.betainc(q - 1.5, 1.5, xm, 1) + 2 * mp.betainc(q - 0.5, 1.5, xm, 1)
    return float(mp.mpf(i0) ** q * b)


@pytest.mark.parametrize("q", [1, 3, 8])
def test_power_law_callable(q):
    i0 = 1.5e14
    s = focal_average(lambda i: (i / i0) ** q, i0)
    assert s == pytest.approx(power_law_oracle(q, 1.0, 0.01), rel=1e-9)


@pytest.mark.parametrize("q", [1, 3, 8])
def test_power_law_tabulated(q):
    # log-log interpolation reproduces a power law exactly between nodes
    grid = np.geomspace(1e12, 3e14, 23)
    curve = YieldCurve(grid, (grid / grid[-1]) ** q)
    for i0 in (3e14, 1.1e14):
        s = focal_average(curve, i0)
        ref = power_law_oracle(q, i0 / grid[-1], 0.01)
        assert s == pytest.approx(ref, rel=1e-8)


def test_focal_domain_error():
    curve = YieldCurve([1e13, 1e14], [1e-4, 1e-2])
    with pytest.raises(ValueError, match="does not cover"):
        focal_average(curve, 1e14)  # needs down to 1e12
    with pytest.raises(ValueError, match="1.2e"):
        focal_average(curve, 1.2e14, 2e13)
    with pytest.raises(ValueError):
        focal_average(curve, 1e14, 2e14)


# coefficients stay clear of subnormal underflow, where relative bounds lose meaning
COEF = st.one_of(st.just(0.0), st.floats(1e-6, 5), st.floats(-5, -1e-6))


@settings(max_examples=30, deadline=None)
@given(COEF, COEF, st.floats(0.5, 4), st.floats(1e13, 1e15))
def test_focal_linearity(a, b, q, i0):
    y1 = lambda i: (i / 1e15) ** q  # noqa: E731
    y2 = lambda i: math.exp(-i / 3e14)  # noqa: E731
    lhs = focal_average(lambda i: a * y1(i) + b * y2(i), i0)
    rhs = a * focal_average(y1, i0) + b * focal_average(y2, i0)
    scale = abs(a) * focal_average(y1, i0) + abs(b) * focal_average(y2, i0)
    assert abs(lhs - rhs) <= 1e-10 * scale


def test_global_factor_gives_constant_ratio():
    grid = np.geomspace(1e12, 3e14, 40)
    y = 0.5 * (grid / grid[-1]) ** 4 * (1 + 0.2 * np.sin(3 * np.log(grid)))
    s = 0.37
    scan = ratio_from_curves(YieldCurve(grid, s * y), YieldCurve(grid, y), grid[grid >= 1e14],
                             with_focal=True)
    assert np.allclose(scan.ratio, s, rtol=1e-12, atol=0)
    same = ratio_from_curves(YieldCurve(grid, y), YieldCurve(grid, y), grid[grid >= 1e14],
                             with_focal=True, rescale=1.18)
    assert np.all(same.ratio == 1.18)


def total_variation(v):
    return float(np.sum(np.abs(np.diff(v))))


def test_focal_smoothing():
    grid = np.geomspace(1e12, 3e14, 160)
    base = (grid / grid[-1]) ** 5
    par = YieldCurve(grid, base * (1 + 0.3 * np.sin(8 * np.log(grid / 1e12))) / 1.3)
    perp = YieldCurve(grid, base)
    peaks = grid[grid >= 1e14]
    raw = ratio_from_curves(par, perp, peaks)
    avg = ratio_from_curves(par, perp, peaks, with_focal=True)
    assert total_variation(avg.ratio) <= total_variation(raw.ratio)


def test_zero_perpendicular_is_nan():
    grid = np.array([1e13, 2e13])
    scan = ratio_from_curves(YieldCurve(grid, [1e-3, 2e-3]), YieldCurve(grid, [0.0, 1e-3]), grid)
    assert math.isnan(scan.ratio[0]) and scan.ratio[1] == pytest.approx(2.0)


def test_yield_curve_validation():
    with pytest.raises(ValueError):
        YieldCurve([2e13, 1e13], [0.1, 0.2])
    with pytest.raises(ValueError):
        YieldCurve([1e13, 2e13], [0.1, math.nan])
    with pytest.raises(ValueError):
        YieldCurve([1e13, 2e13], [0.1, 1.5])
    assert YieldCurve([1e13, 2e13], [0.1, 1.5], probability=False)(2e13) == 1.5


# ------------------------------------------------------------ ratio scans

def test_ratio_scan_atomic_limit():
    atom = MoleculeModel(0.0, 0.6045)
    scan = ratio_scan(np.geomspace(2e13, 6e13, 4), atom, OMEGA, n_grid=32)
    assert np.allclose(scan.ratio, 1.0, rtol=0, atol=1e-10)


def test_ratio_scan_single_channel_limit():
    mol = MoleculeModel(3.0, 0.6045)
    gaps = []
    for i0 in (3e12, 1e12):
        laser = laser_from_lab(800, i0)
        x = ratio_exact(min_open_channel(laser, mol.e_ion), laser, mol)
        scan = ratio_scan([i0], mol, OMEGA, n_grid=32)
        gaps.append(abs(scan.ratio[0] - x))
    assert gaps[1] < gaps[0] and gaps[1] < 2e-3


def test_ratio_scan_validation():
    with pytest.raises(ValueError):
        ratio_scan([2e13, 1e13], H2, OMEGA)
    with pytest.raises(ValueError):
        ratio_scan([], H2, OMEGA)
