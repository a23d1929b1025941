"""Acceptance criteria 1-10, one test each.

Every test records a ``criterion N: PASS/FAIL`` line (printed immediately and
again in the pytest terminal summary) before asserting, so a failing
criterion still reports its measured value. Runtimes are wall-clock on the
work named by the criterion. Run directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import jv

from mosfa.cli import cmd_ratio, cmd_spectrum
from mosfa.config import parse_config_text
from mosfa.molecule import MoleculeModel, momentum_norm
from mosfa.pulse_yield import YieldCurve, focal_average, ratio_from_curves
from mosfa.sfa_rates import (azimuthal_identity, channel_kinematics, locate_ratio_minimum,
                             min_open_channel, ratio_2d, ratio_curve, ratio_exact, ratio_reduced)
from mosfa.specialfn import gen_bessel, gen_bessel_row, parseval_cut
from mosfa.units import LaserParams, laser_from_lab

try:
    from tests.acceptance_log import record
except ImportError:  # run as a script from inside tests/
    from acceptance_log import record

E_ION = 0.6045
R3_2E13 = """\
laser: {wavelength_nm: 800, intensity_Wcm2: 2e13}
molecule: {R_bohr: 3.0, E_ion_hartree: 0.6045}
"""


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def check(number, ok, detail):
    record(number, bool(ok), detail)
    assert ok, detail


# ---------------------------------------------------------------- 1

def test_criterion_01_interference_minimum():
    exact = math.pi**2 / 18
    e, _ = timed(locate_ratio_minimum, 3.0, 0.3, 0.8)
    # best of five so interpreter warm-up is not billed to the root finder
    best = min(timed(locate_ratio_minimum, 3.0, 0.3, 0.8)[1] for _ in range(5))
    err = abs(e - exact)
    check(1, err < 1e-10 and best < 1e-3,
          f"E_min={e:.15f} (|err|={err:.1e}, tol 1e-10) in {best * 1e3:.3f} ms (< 1 ms)")


# ---------------------------------------------------------------- 2

def test_criterion_02_reduced_vs_2d():
    laser = laser_from_lab(800, 2e13)
    mol = MoleculeModel(3.0, E_ION)
    n0 = min_open_channel(laser, E_ION)

    def worst():
        return max(abs(ratio_2d(n, laser, mol) - ratio_exact(n, laser, mol)) / ratio_exact(n, laser, mol)
                   for n in range(n0, n0 + 31))

    dev, dt = timed(worst)
    check(2, dev < 1e-8 and dt < 30,
          f"N={n0}..{n0 + 30} max rel dev {dev:.1e} (tol 1e-8) in {dt:.2f} s (< 30 s)")


# ---------------------------------------------------------------- 3

def test_criterion_03_strong_field_ladder():
    # 800 nm, 2e13 W/cm^2, E_ion 0.6045; N chosen so that alpha0 k_N is nearest g
    omega, up, alpha0, b = 0.05695419, 0.04392174, 7.35942849, 0.3856
    ladder = (5, 10, 20, 40)

    def run():
        out = {}
        for d in (0.5, 1.0, 2.0):
            c2 = math.cos(d) ** 2
            devs = []
            for g in ladder:
                n = round(((g / alpha0) ** 2 / 2 + up + E_ION) / omega)
                devs.append(abs(ratio_reduced(n, g, b, d) - c2) / max(c2, 0.05))
            out[d] = devs
        return out

    devs, dt = timed(run)
    mono = all(all(np.diff(v) < 0) for v in devs.values())
    top = max(v[-1] for v in devs.values())
    table = "; ".join(f"d={d}: " + ",".join(f"{x:.2%}" for x in v) for d, v in devs.items())
    check(3, mono and top < 0.02 and dt < 10,
          f"monotone={mono}, max dev at g=40 {top:.2%} (< 2%) [{table}] in {dt:.2f} s (< 10 s)")


# ---------------------------------------------------------------- 4

def test_criterion_04_atomic_limit():
    curve, dt = timed(ratio_curve, laser_from_lab(800, 2e13), MoleculeModel(0.0, E_ION))
    dev = float(np.max(np.abs(curve.x_exact - 1.0)))
    check(4, dev < 1e-10 and dt < 5,
          f"{len(curve.x_exact)} channels, max |X_N - 1| = {dev:.1e} (tol 1e-10) in {dt:.2f} s (< 5 s)")


# ---------------------------------------------------------------- 5

def generating_oracle(n, u, v, points=1024):
    # (1/2pi) int cos(n t - u sin t - v sin 2t) dt by the periodic trapezoid rule
    t = 2 * np.pi * np.arange(points) / points
    return float(np.mean(np.cos(n * t - u * np.sin(t) - v * np.sin(2 * t))))


def test_criterion_05_bessel_suite():
    rng = np.random.default_rng(20240605)
    us = rng.uniform(-20, 20, 100)
    vs = rng.uniform(-5, 5, 100)
    ns = rng.integers(-50, 51, 100)

    def run():
        pars, par_err, red, orc = 0.0, 0.0, 0.0, 0.0
        for n, u, v in zip(ns, us, vs):
            n = int(n)
            cut = parseval_cut(u, v)
            pars = max(pars, abs(math.fsum(gen_bessel_row(-cut, cut, u, v) ** 2) - 1.0))
            par_err = max(par_err, abs(gen_bessel(n, -u, v) - (-1) ** n * gen_bessel(n, u, v)))
            red = max(red, abs(gen_bessel(n, u, 0.0) - jv(n, u)))
            orc = max(orc, abs(gen_bessel(n, u, v) - generating_oracle(n, u, v)))
        return pars, par_err, red, orc

    (pars, par_err, red, orc), dt = timed(run)
    ok = pars < 1e-10 and par_err < 1e-12 and red < 1e-12 and orc < 1e-10 and dt < 60
    check(5, ok, f"100 triples: Parseval {pars:.1e} (1e-10), parity {par_err:.1e} (1e-12), "
                 f"v=0 {red:.1e} (1e-12), oracle {orc:.1e} (1e-10) in {dt:.2f} s (< 60 s)")


# ---------------------------------------------------------------- 6

def test_criterion_06_azimuthal_identity():
    deltas = np.linspace(0.0, 20.0, 200)

    def run():
        worst = 0.0
        for d in deltas:
            ref = quad(lambda p: math.cos(d * math.cos(p)) ** 2, 0, 2 * math.pi,
                       epsabs=1e-13, epsrel=0, limit=400)[0]
            worst = max(worst, abs(float(azimuthal_identity(d)) - ref))
        return worst

    worst, dt = timed(run)
    check(6, worst < 1e-12 and dt < 5,
          f"200 deltas in [0, 20], max abs dev {worst:.1e} (tol 1e-12) in {dt:.2f} s (< 5 s)")


# ---------------------------------------------------------------- 7

def test_criterion_07_normalization():
    grid = [(k, r) for k in (0.8, 1.0, 1.1) for r in (0.0, 1.4, 3.0)]
    norms, dt = timed(lambda: [momentum_norm(k, r, n_k=400, n_c=400) for k, r in grid])
    dev = max(abs(x - 1.0) for x in norms)
    check(7, dev < 1e-8 and dt < 10,
          f"9 (kappa, R) pairs, max |norm - 1| = {dev:.1e} (tol 1e-8) in {dt:.2f} s (< 10 s)")


# ---------------------------------------------------------------- 8

def test_criterion_08_kinematics():
    omega, up = 0.0569542, 0.043922
    laser = LaserParams(omega, 2 * omega * math.sqrt(up))

    def run():
        n = min_open_channel(laser, E_ION)
        return n, channel_kinematics(12, laser, E_ION)

    run()
    (n, k), _ = timed(run)
    dt = min(timed(run)[1] for _ in range(5))
    check(8, n == 12 and abs(k - 0.26469) <= 1e-5 and dt < 1e-3,
          f"N_min={n} (12), k_12={k:.6f} (0.26469 +- 1e-5) in {dt * 1e3:.3f} ms (< 1 ms)")


# ---------------------------------------------------------------- 9

def power_law_reference(q, fraction=0.01):
    import mpmath as mp

    xm = mp.mpf(fraction)
    return float(mp.betainc(q - 1.5, 1.5, xm, 1) + 2 * mp.betainc(q - 0.5, 1.5, xm, 1))


def test_criterion_09_focal_averaging():
    refs = {q: power_law_reference(q) for q in (1, 3, 8)}

    def run():
        i0 = 2e14
        errs = []
        for q, ref in refs.items():
            s = focal_average(lambda i: (i / i0) ** q, i0)
            errs.append(abs(s / ref - 1))
        grid = np.geomspace(1e12, 3e14, 120)
        y = 1e-6 * (grid / 1e13) ** 4 / (1 + (grid / 1e14) ** 4)
        peaks = grid[grid >= 1e14]
        same = ratio_from_curves(YieldCurve(grid, y), YieldCurve(grid, y), peaks, with_focal=True)
        osc = y * (1 + 0.3 * np.sin(10 * np.log(grid / 1e12))) / 1.3
        raw = ratio_from_curves(YieldCurve(grid, osc), YieldCurve(grid, y), peaks)
        avg = ratio_from_curves(YieldCurve(grid, osc), YieldCurve(grid, y), peaks, with_focal=True)
        tv = [float(np.sum(np.abs(np.diff(r.ratio)))) for r in (raw, avg)]
        return max(errs), bool(np.all(same.ratio == 1.0)), tv

    (err, ones, tv), dt = timed(run)
    check(9, err < 1e-5 and ones and tv[1] <= tv[0] and dt < 5,
          f"power law max rel err {err:.1e} (1e-5), identical ratio == 1: {ones}, "
          f"TV {tv[0]:.3f} -> {tv[1]:.3f} in {dt:.2f} s (< 5 s)")


# ---------------------------------------------------------------- 10

def test_criterion_10_determinism():
    serial = parse_config_text(R3_2E13)
    parallel = serial.replace("numerics", workers=4)
    _, t_spec = timed(cmd_spectrum, serial)
    a, t_a = timed(cmd_ratio, serial)
    b, t_b = timed(cmd_ratio, serial)
    c, t_c = timed(cmd_ratio, parallel)
    d, t_d = timed(cmd_ratio, parallel)
    body = lambda s: [ln for ln in s.splitlines() if not ln.startswith("#")]  # noqa: E731
    same = a == b and c == d and body(a) == body(c)
    slow = max(t_a, t_b, t_c, t_d)
    check(10, same and slow < 2 * t_spec,
          f"byte-identical serial={a == b}, workers=4: {c == d}, serial vs parallel data: "
          f"{body(a) == body(c)}; slowest ratio run {slow:.2f} s vs 2 x spectrum {2 * t_spec:.2f} s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
