"""Pulse-integrated yields, intensity scans and focal-volume averaging.

Yields follow a rate equation with the cycle-averaged total rate evaluated at
the instantaneous cos^2 envelope field:

    P = 1 - exp(-int Gamma_total(F(t)) dt).

Gamma_total(F) is tabulated once per orientation on a field grid (see
``RateTable``), so a whole intensity scan shares one table.

Focal averaging uses the iso-intensity volume of a TEM00 Gaussian focus,
dV/dI ~ I^(-5/2) (I0 - I)^(1/2) (I0 + 2 I), cut off below ``i_min``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from mosfa.molecule import MoleculeModel
from mosfa.sfa_rates import ati_spectrum, channel_rate
from mosfa.specialfn import bessel_j
from mosfa.units import (INTENSITY_AU, LaserParams, coulomb_correction, derive_params,
                         intensity_to_field)

COULOMB_MODES = ("envelope", "peak")


@dataclass(frozen=True)
class PulseSpec:
    peak_field: float
    omega: float
    n_cycles: int = 10

    def __post_init__(self):
        if self.n_cycles <= 0:
            raise ValueError("n_cycles must be positive")
        if not self.omega > 0 or self.peak_field < 0:
            raise ValueError("need omega > 0 and peak_field >= 0")

    @classmethod
    def from_laser(cls, laser: LaserParams, n_cycles: int = 10) -> "PulseSpec":
        return cls(laser.field_peak, laser.omega, n_cycles)

    @property
    def duration(self) -> float:
        """Full cos^2 envelope length n_cycles * 2 pi / omega (a.u. of time)."""
        return self.n_cycles * 2.0 * math.pi / self.omega

    @property
    def peak_intensity(self) -> float:
        return self.peak_field**2 * INTENSITY_AU


def envelope(t, pulse: PulseSpec):
    """Field amplitude F0 cos^2(pi t / T) inside |t| <= T/2, zero outside."""
    t = np.asarray(t, dtype=float)
    T = pulse.duration
    out = np.where(np.abs(t) <= T / 2, pulse.peak_field * np.cos(math.pi * t / T) ** 2, 0.0)
    return float(out) if out.ndim == 0 else out


def total_rate(field_amp: float, omega: float, mol: MoleculeModel, rtol: float = 1e-8,
               workers: int = 1) -> float:
    """Sum of all open channel rates at a fixed field amplitude, C^2 at that field."""
    if field_amp <= 0.0:
        return 0.0
    return ati_spectrum(derive_params(field_amp, omega), mol, rtol=rtol, workers=workers).total_rate


def closing_field(n: int, omega: float, e_ion: float) -> float:
    """Field at which channel n closes: n omega = U_p(F) + E_ion."""
    excess = n * omega - e_ion
    return 2.0 * omega * math.sqrt(excess) if excess > 0 else 0.0


def _threshold_power(n: int) -> int:
    # Gamma_N ~ k^1 above threshold for even N, k^3 for odd N (J_N(0, v) = 0)
    return 1 if n % 2 == 0 else 3


@dataclass
class ChannelTrack:
    """q_N = Gamma_N / k_N^p for one channel on its own field nodes.

    Interpolated by a cubic spline in (log F, log q). High channels are cut
    from low-field spectra by the tail criterion, so leading zero nodes are
    dropped and the track reads zero below its first positive node.
    """

    n_photons: int
    f_close: float
    fields: np.ndarray
    reduced: np.ndarray
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False)
    _f_first: float = field(default=0.0, init=False, repr=False)

    def __post_init__(self):
        pos = np.nonzero(self.reduced > 0)[0]
        if pos.size == 0:
            self._f_first = math.inf
            return
        fs, q = self.fields[pos[0]:], self.reduced[pos[0]:]
        if np.any(q <= 0):
            raise ValueError(f"channel {self.n_photons}: zero rate inside its track")
        self._f_first = float(fs[0])
        if fs.size >= 3:
            self._spline = CubicSpline(np.log(fs), np.log(q))
        else:
            self._spline = _LogLine(np.log(fs), np.log(q))

    def __call__(self, f: float) -> float:
        if f < self._f_first * (1.0 - 1e-12):
            return 0.0
        return math.exp(float(self._spline(math.log(f))))


class _LogLine:
    # straight-line fallback for tracks with fewer than three nodes
    def __init__(self, x, y):
        self.x, self.y = x, y

    def __call__(self, x):
        if self.x.size == 1:
            return self.y[0]
        return self.y[0] + (self.y[1] - self.y[0]) * (x - self.x[0]) / (self.x[1] - self.x[0])


@dataclass
class RateTable:
    """Channel-resolved Gamma_total(F) for interpolation inside pulse integrals.

    A channel switches off at its closing field F_c like a power of
    k_N ~ sqrt(F_c - F), so the summed rate has cusps no grid interpolation
    follows. Each channel is tracked separately as q_N = Gamma_N / k_N^p
    (p = 1 for even N, 3 for odd N), which is smooth in k_N^2 and finite at
    F_c. q_N varies on the scale u = alpha0 k_N ~ 1 near threshold, so every
    channel gets extra single-channel nodes uniform in k up to
    u = ``U_REFINE`` wherever those fall inside the table range, plus the
    exact threshold limit when F_c itself does. Elsewhere q_N comes
    from full spectra on a geometric grid merged with nodes uniform in U_p
    (spacing omega / 4 at the default 64 points). Each channel is splined
    in log-log (``ChannelTrack``); Gamma_N = k_N^p q_N uses the exact k_N.
    """

    omega: float
    mol: MoleculeModel
    fields: np.ndarray  # geometric grid plus closing fields
    tracks: dict

    U_REFINE = 10.0
    N_REFINE = 20
    UP_STEP = 16.0  # U_p spacing is UP_STEP * omega / n_points

    @classmethod
    def build(cls, omega: float, mol: MoleculeModel, f_hi: float, f_lo: Optional[float] = None,
              n_points: int = 64, rtol: float = 1e-8, workers: int = 1) -> "RateTable":
        if f_lo is None:
            f_lo = 1e-1 * f_hi
        if not 0 < f_lo < f_hi:
            raise ValueError(f"need 0 < f_lo < f_hi, got {f_lo}, {f_hi}")
        # geometric nodes follow the exponential low-field rise; channel rates
        # also change each time U_p moves by a fraction of omega
        up_lo, up_hi = (f_lo / (2 * omega)) ** 2, (f_hi / (2 * omega)) ** 2
        n_up = int(math.ceil((up_hi - up_lo) / (cls.UP_STEP * omega / n_points))) + 1
        up_nodes = np.linspace(up_lo, up_hi, max(n_up, 2))
        grid = np.union1d(np.geomspace(f_lo, f_hi, n_points), 2 * omega * np.sqrt(up_nodes))
        grid = grid[(grid >= f_lo) & (grid <= f_hi)]
        rows = []
        for f in grid:
            spec = ati_spectrum(derive_params(f, omega), mol, rtol=rtol, workers=workers)
            rows.append({c.n_photons: c.rate / c.k_n ** _threshold_power(c.n_photons)
                         for c in spec.channels})
        tracks = {}
        for n in sorted(set().union(*rows)):
            fc = closing_field(n, omega, mol.e_ion)
            pts = {f: row.get(n, 0.0) for f, row in zip(grid, rows) if f < fc}
            # the tail cutoff is not monotone in F: fill channels dropped from
            # interior spectra so each track is gap-free above its first node
            first = min(f for f, row in zip(grid, rows) if n in row)
            for f, row in zip(grid, rows):
                if first < f < fc and n not in row:
                    laser = derive_params(f, omega)
                    kk = math.sqrt(2.0 * (n * omega - laser.up - mol.e_ion))
                    pts[f] = channel_rate(n, laser, mol, rtol) / kk ** _threshold_power(n)
            alpha_c = fc / omega**2
            for k in np.linspace(0.0, cls.U_REFINE / alpha_c, cls.N_REFINE + 1)[1:]:
                up = n * omega - mol.e_ion - 0.5 * k * k
                if up <= 0:
                    break
                f = 2.0 * omega * math.sqrt(up)
                if f <= f_lo:
                    break
                if f >= f_hi:
                    continue
                laser = derive_params(f, omega)
                kk = math.sqrt(2.0 * (n * omega - laser.up - mol.e_ion))
                pts[f] = channel_rate(n, laser, mol, rtol) / kk ** _threshold_power(n)
            if f_lo < fc < f_hi:
                pts[fc] = threshold_limit(n, derive_params(fc, omega), mol)
            if not pts:
                continue
            fs = np.array(sorted(pts))
            tracks[n] = ChannelTrack(n, fc, fs, np.array([pts[f] for f in fs]))
        closings = [t.f_close for t in tracks.values() if f_lo < t.f_close < f_hi]
        return cls(omega, mol, np.union1d(grid, closings), tracks)

    def __call__(self, f: float) -> float:
        if f <= 0.0:
            return 0.0
        if f > self.fields[-1] * (1 + 1e-12):
            raise ValueError(f"field {f} above rate table range {self.fields[-1]}")
        f0, f1 = self.fields[0], self.fields[1]
        if f < f0:
            # power law from the two lowest nodes; the rate here is negligible
            g0, g1 = self._sum(f0), self._sum(f1)
            if g0 <= 0 or g1 <= 0:
                return 0.0
            return g0 * math.exp(math.log(g1 / g0) * math.log(f / f0) / math.log(f1 / f0))
        return self._sum(f)

    def _sum(self, f: float) -> float:
        up = f * f / (4.0 * self.omega**2)
        terms = []
        for n, track in self.tracks.items():
            excess = n * self.omega - up - self.mol.e_ion
            if excess <= 0:
                continue
            terms.append(math.sqrt(2.0 * excess) ** _threshold_power(n) * track(f))
        return math.fsum(terms)


def threshold_limit(n: int, laser: LaserParams, mol: MoleculeModel) -> float:
    """lim Gamma_N / k_N^p as k_N -> 0 at fixed field (p = 1 even N, 3 odd N).

    At k = 0 the interference factor is 1 in every direction. For even N
    the Bessel factor tends to J_N(0, -b) = J_{N/2}(-b); for odd N it
    vanishes linearly in u = alpha0 k cos(theta) with slope
    (J_{(N-1)/2}(-b) - J_{(N+1)/2}(-b)) / 2, and cos^2 averages to 1/3.
    """
    pref = (2.0 * math.pi * coulomb_correction(mol.kappa, laser.field_peak)
            * (laser.up - n * laser.omega) ** 2 * float(mol.momentum_density(0.0)))
    v = -laser.bessel_v
    if n % 2 == 0:
        ang = 4.0 * math.pi * bessel_j(n // 2, v) ** 2
    else:
        slope = 0.5 * (bessel_j((n - 1) // 2, v) - bessel_j((n + 1) // 2, v))
        ang = 4.0 * math.pi / 3.0 * (laser.alpha0 * slope) ** 2
    return mol.n_electrons * pref * ang


def pulse_yield(mol: MoleculeModel, pulse: PulseSpec, rate: Optional[Callable[[float], float]] = None,
                coulomb: str = "envelope", n_grid: int = 64, rtol: float = 1e-8,
                epsrel: float = 1e-6) -> float:
    """Ionization probability after one pulse.

    Parameters
    ----------
    rate : callable, optional
        Gamma_total as a function of instantaneous field, with the Coulomb
        factor evaluated at that field. Built from the SFA channel sum when
        omitted.
    coulomb : {"envelope", "peak"}
        Field used in the Coulomb correction: the instantaneous envelope or
        the pulse peak.
    """
    if coulomb not in COULOMB_MODES:
        raise ValueError(f"coulomb must be one of {COULOMB_MODES}, got {coulomb!r}")
    f0 = pulse.peak_field
    if f0 == 0.0:
        return 0.0
    if rate is None:
        rate = RateTable.build(pulse.omega, mol, f0, n_points=n_grid, rtol=rtol)
    breaks = rate.fields if isinstance(rate, RateTable) else None
    return _integrate_pulse(rate, pulse, mol, coulomb, breaks, epsrel)


def _integrate_pulse(rate, pulse, mol, coulomb, breaks, epsrel):
    f0 = pulse.peak_field
    T = pulse.duration
    if coulomb == "peak":
        expo = 2.0 / mol.kappa

        def gamma(t):
            f = envelope(t, pulse)
            return rate(f) * (f / f0) ** expo if f > 0 else 0.0
    else:
        def gamma(t):
            return rate(envelope(t, pulse))

    edges = [0.0, T / 2]
    if breaks is not None:
        inner = breaks[(breaks > 0) & (breaks < f0)]
        edges = np.unique(np.concatenate([edges, (T / math.pi) * np.arccos(np.sqrt(inner / f0))]))
    # envelope is even in t: integrate one half and double. A channel opening
    # at t_c adds a sqrt(t - t_c) edge, removed by t = a + (b - a) s^2.
    parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        h = b - a
        val, _ = quad(lambda s: gamma(a + h * s * s) * 2.0 * h * s, 0.0, 1.0,
                      epsrel=epsrel, epsabs=0.0, limit=200)
        parts.append(val)
    half = math.fsum(parts)
    return -math.expm1(-2.0 * half)


# ------------------------------------------------------------------ curves

@dataclass
class YieldCurve:
    intensities: np.ndarray
    yields: np.ndarray
    chi: float = 0.0
    focal_averaged: bool = False
    probability: bool = True  # False for external data in arbitrary units

    def __post_init__(self):
        self.intensities = np.asarray(self.intensities, dtype=float)
        self.yields = np.asarray(self.yields, dtype=float)
        if self.intensities.shape != self.yields.shape or self.intensities.ndim != 1:
            raise ValueError("intensities and yields must be 1D arrays of equal length")
        if np.any(np.diff(self.intensities) <= 0):
            raise ValueError("intensities must be strictly increasing")
        if not np.all(np.isfinite(self.yields)):
            raise ValueError("yields must be finite")
        if self.probability and (np.any(self.yields < 0) or np.any(self.yields > 1)):
            raise ValueError("yields are probabilities and must lie in [0, 1]")

    def __call__(self, i):
        """Log-log interpolated yield; linear where a node value is zero."""
        return _loglog(self.intensities, self.yields, i)


def _loglog(xs, ys, x):
    j = int(np.searchsorted(xs, x))
    if j < len(xs) and xs[j] == x:
        return float(ys[j])
    if len(xs) == 1:
        raise ValueError(f"single-point curve cannot be evaluated at {x}")
    i = int(np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2))
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    if y0 > 0 and y1 > 0:
        return float(y0 * math.exp(math.log(y1 / y0) * math.log(x / x0) / math.log(x1 / x0)))
    return float(y0 + (y1 - y0) * (x - x0) / (x1 - x0))


def yield_curve(intensities: Sequence[float], mol: MoleculeModel, omega: float, n_cycles: int = 10,
                table: Optional[RateTable] = None, coulomb: str = "envelope", n_grid: int = 64,
                rtol: float = 1e-8, workers: int = 1) -> YieldCurve:
    """Pulse yields over a peak-intensity grid, sharing one rate table."""
    intensities = np.asarray(intensities, dtype=float)
    fields = np.array([intensity_to_field(i) for i in intensities])
    if table is None:
        table = RateTable.build(omega, mol, fields.max(), 0.1 * fields.min(), n_grid, rtol, workers)
    ys = []
    for f in fields:
        pulse = PulseSpec(f, omega, n_cycles)
        ys.append(0.0 if f == 0 else _integrate_pulse(table, pulse, mol, coulomb, table.fields, 1e-6))
    return YieldCurve(intensities, np.array(ys), chi=mol.chi)


# ---------------------------------------------------------------- focal volume

def focal_weight(i, i0: float):
    """Relative iso-intensity volume dV/dI of a Gaussian focus with peak ``i0``."""
    i = np.asarray(i, dtype=float)
    if np.any(i <= 0) or np.any(i > i0):
        raise ValueError(f"focal weight needs 0 < I <= I0 = {i0}")
    out = i**-2.5 * np.sqrt(i0 - i) * (i0 + 2.0 * i)
    return float(out) if out.ndim == 0 else out


def focal_average(curve: Union[YieldCurve, Callable[[float], float]], i0: float,
                  i_min: Optional[float] = None, epsrel: float = 1e-11) -> float:
    """Focal-volume integral of a yield, int_{i_min}^{i0} Y(I) dV/dI dI.

    ``curve`` may be a tabulated ``YieldCurve`` (log-log interpolated) or any
    callable Y(I). The default cutoff is ``i0 / 100``. The square-root edge at
    ``i0`` is removed by integrating in u = sqrt(i0 - I).
    """
    if i_min is None:
        i_min = 1e-2 * i0
    if not 0 < i_min < i0:
        raise ValueError(f"need 0 < i_min < i0, got i_min={i_min}, i0={i0}")
    if isinstance(curve, YieldCurve):
        lo, hi = curve.intensities[0], curve.intensities[-1]
        tol = 1e-12
        if lo > i_min * (1 + tol) or hi < i0 * (1 - tol):
            missing = []
            if lo > i_min * (1 + tol):
                missing.append(f"[{i_min:.6g}, {lo:.6g})")
            if hi < i0 * (1 - tol):
                missing.append(f"({hi:.6g}, {i0:.6g}]")
            raise ValueError("yield curve does not cover " + " and ".join(missing) + " W/cm^2")
        nodes = curve.intensities[(curve.intensities > i_min) & (curve.intensities < i0)]
        yfun = curve
    else:
        nodes = np.array([])
        yfun = curve

    def integrand(u):
        i = i0 - u * u
        return yfun(i) * i**-2.5 * (i0 + 2.0 * i) * 2.0 * u * u

    edges = np.sqrt(i0 - np.concatenate(([i0], nodes[::-1], [i_min])))
    parts = [quad(integrand, a, b, epsrel=epsrel, epsabs=0.0, limit=200)[0]
             for a, b in zip(edges[:-1], edges[1:])]
    return math.fsum(parts)


# ----------------------------------------------------------------- ratio scan

@dataclass
class RatioScan:
    intensities: np.ndarray
    signal_parallel: np.ndarray
    signal_perpendicular: np.ndarray
    ratio: np.ndarray
    focal_averaged: bool = False
    rescale: float = 1.0
    yields: dict = field(default_factory=dict)


def _safe_ratio(num, den, rescale):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.full(num.shape, np.nan)
    ok = den > 0
    out[ok] = rescale * num[ok] / den[ok]
    return out


def ratio_from_curves(par: YieldCurve, perp: YieldCurve, peaks: Sequence[float],
                      with_focal: bool = False, rescale: float = 1.0,
                      i_min_fraction: float = 1e-2) -> RatioScan:
    """Parallel/perpendicular ratio at each peak intensity from two yield curves.

    Points where the perpendicular signal vanishes come out as NaN.
    """
    peaks = np.asarray(peaks, dtype=float)
    if with_focal:
        sp = np.array([focal_average(par, i0, i_min_fraction * i0) for i0 in peaks])
        sq = np.array([focal_average(perp, i0, i_min_fraction * i0) for i0 in peaks])
    else:
        sp = np.array([par(i0) for i0 in peaks])
        sq = np.array([perp(i0) for i0 in peaks])
    return RatioScan(peaks, sp, sq, _safe_ratio(sp, sq, rescale), with_focal, rescale,
                     {"parallel": par, "perpendicular": perp})


def ratio_scan(intensities: Sequence[float], mol: MoleculeModel, omega: float, n_cycles: int = 10,
               with_focal: bool = False, rescale: float = 1.0, i_min_fraction: float = 1e-2,
               n_grid: int = 64, n_yield: int = 96, coulomb: str = "envelope", rtol: float = 1e-8,
               workers: int = 1) -> RatioScan:
    """Yield ratio Y_par / Y_perp versus peak intensity, raw or focal averaged.

    ``rescale`` multiplies every ratio (experimental comparison).
    """
    peaks = np.asarray(intensities, dtype=float)
    if peaks.size == 0 or np.any(np.diff(peaks) <= 0) or peaks[0] <= 0:
        raise ValueError("intensity grid must be nonempty, positive and ascending")
    lo = peaks[0] * (i_min_fraction if with_focal else 1.0)
    grid = np.union1d(np.geomspace(lo, peaks[-1], n_yield), peaks) if with_focal else peaks
    f_hi = intensity_to_field(peaks[-1])
    f_lo = 0.1 * intensity_to_field(grid[0])
    curves = []
    for chi in (0.0, math.pi / 2):
        m = mol.oriented(chi)
        table = RateTable.build(omega, m, f_hi, f_lo, n_grid, rtol, workers)
        curves.append(yield_curve(grid, m, omega, n_cycles, table, coulomb))
    return ratio_from_curves(curves[0], curves[1], peaks, with_focal, rescale, i_min_fraction)
