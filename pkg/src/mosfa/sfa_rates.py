"""N-photon rates, ATI spectra and parallel/perpendicular ratios (MO-SFA-VG).

For a channel with N absorbed photons the electron leaves with momentum
k_N, k_N^2/2 = N omega - (U_p + E_ion). The angular dependence of the
differential rate sits in two factors,

    J_N^2(alpha0 k_N cos(theta), U_p / (2 omega)) * cos^2(k_N R (k_hat . R_hat) / 2),

and everything else depends only on |k|. Solid-angle integrals are done with
Gauss-Legendre in cos(theta) on [0, 1] (the integrand is even under
inversion) and, for a tilted molecule, the periodic trapezoid rule in the
azimuth. Node counts are doubled until the relative change drops below
``rtol``.

Sign of the second Bessel argument: the Volkov phase of a field
F cos(omega t) expands as exp(i(u sin s - v sin 2s)) with v = U_p/(2 omega) > 0,
so the N-photon amplitude is J_N(u, -v) in the convention of
``mosfa.specialfn`` (equivalently J_{-N}(u, v)). With +v the stationary-phase
condition admits real, over-the-barrier solutions and rates come out orders
of magnitude too large. Everywhere below ``b`` means U_p/(2 omega) >= 0 and
the sign is applied in ``volkov_bessel``.

The Bessel factor can underflow for high channels, so angular integrals are
carried with J_N divided by a reference maximum; the scale is restored only
when an absolute rate is requested.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq

from mosfa.molecule import MoleculeModel
from mosfa.specialfn import bessel_j, gen_bessel_many
from mosfa.units import HARTREE_EV, LaserParams, coulomb_correction

START_ORDER = 32
MAX_ORDER = 4096
MAX_PHI = 1024
TAIL_CUTOFF = 1e-12
MAX_EXTRA_CHANNELS = 200

_HALF_PI = math.pi / 2


class NumericalError(ArithmeticError):
    """Raised when a quadrature cannot produce a trustworthy number."""


class ConvergenceError(NumericalError):
    def __init__(self, msg, residual=float("nan"), channel=None):
        super().__init__(msg)
        self.residual = residual
        self.channel = channel


@dataclass(frozen=True)
class AtiChannel:
    n_photons: int
    k_n: float
    energy: float
    rate: float
    open: bool = True

    @property
    def energy_ev(self) -> float:
        return self.energy * HARTREE_EV


@dataclass
class AtiSpectrum:
    channels: List[AtiChannel]
    laser: LaserParams
    molecule: MoleculeModel

    @property
    def photons(self) -> np.ndarray:
        return np.array([c.n_photons for c in self.channels], dtype=int)

    @property
    def energies(self) -> np.ndarray:
        return np.array([c.energy for c in self.channels])

    @property
    def energies_ev(self) -> np.ndarray:
        return self.energies * HARTREE_EV

    @property
    def rates(self) -> np.ndarray:
        return np.array([c.rate for c in self.channels])

    @property
    def total_rate(self) -> float:
        return float(math.fsum(c.rate for c in self.channels))


@dataclass(frozen=True)
class RatioPoint:
    n_photons: int
    energy: float
    x_exact: float
    x_approx: float


@dataclass
class RatioCurve:
    points: List[RatioPoint] = field(default_factory=list)
    r_sep: float = 0.0

    @property
    def energies(self) -> np.ndarray:
        return np.array([p.energy for p in self.points])

    @property
    def x_exact(self) -> np.ndarray:
        return np.array([p.x_exact for p in self.points])

    @property
    def x_approx(self) -> np.ndarray:
        return np.array([p.x_approx for p in self.points])


# ---------------------------------------------------------------- kinematics

def excess_energy(n: int, laser: LaserParams, e_ion: float) -> float:
    return n * laser.omega - (laser.up + e_ion)


def channel_kinematics(n: int, laser: LaserParams, e_ion: float) -> Optional[float]:
    """Electron momentum k_N, or None when the channel is closed."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    excess = excess_energy(n, laser, e_ion)
    if excess <= 0:
        return None
    return math.sqrt(2.0 * excess)


def min_open_channel(laser: LaserParams, e_ion: float) -> int:
    n = int(math.floor((laser.up + e_ion) / laser.omega))
    while excess_energy(n, laser, e_ion) <= 0:
        n += 1
    while n > 1 and excess_energy(n - 1, laser, e_ion) > 0:
        n -= 1
    return n


def reduced_args(n: int, laser: LaserParams, mol: MoleculeModel):
    """(k_N, g_N, b, d_N) with g_N = alpha0 k_N, b = U_p/(2 omega), d_N = R k_N / 2."""
    k = channel_kinematics(n, laser, mol.e_ion)
    if k is None:
        raise ValueError(f"channel N={n} is closed")
    return k, laser.alpha0 * k, laser.bessel_v, mol.r_sep * k / 2.0


# ----------------------------------------------------------- angular pieces

def azimuthal_identity(delta):
    """Closed form of the azimuthal integral of cos^2(delta cos(phi)): pi (1 + J_0(2 delta))."""
    return math.pi * (1.0 + bessel_j(0, 2.0 * np.asarray(delta)))


def _legendre01(order: int):
    t, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (t + 1.0), 0.5 * w


def volkov_bessel(n: int, u, b: float):
    """N-photon Bessel factor J_N(u, -b) for b = U_p / (2 omega)."""
    return gen_bessel_many(n, u, -b)


def bessel_scale(n: int, g: float, b: float) -> float:
    """Reference magnitude of J_N(g c, b) on c in [0, 1], fixed across node counts."""
    c = np.append(_legendre01(START_ORDER)[0], 1.0)
    scale = float(np.max(np.abs(volkov_bessel(n, g * c, b))))
    if scale == 0.0 or not math.isfinite(scale):
        raise NumericalError(f"J_{n} vanishes on every node (g={g}, b={b}); ratio undefined")
    return scale


def _scaled_bessel_sq(n, g, b, c, scale):
    return (volkov_bessel(n, g * c, b) / scale) ** 2


def _angular_sum(n, g, b, d, chi, order, method, scale):
    """Full solid-angle integral of J_N^2 cos^2(d k.R), J_N divided by ``scale``."""
    c, w = _legendre01(order)
    jsq = _scaled_bessel_sq(n, g, b, c, scale)
    if method == "auto" and chi == 0.0:
        ang = 2.0 * math.pi * np.cos(d * c) ** 2
    elif method == "auto" and chi == _HALF_PI:
        s = np.sqrt(1.0 - c * c)
        ang = math.pi * (1.0 + bessel_j(0, 2.0 * d * s))
    else:
        m = min(max(order, 16), MAX_PHI)
        m += m % 2  # symmetric azimuth grid keeps the c -> -c reflection exact
        phi = 2.0 * math.pi * np.arange(m) / m
        s = np.sqrt(1.0 - c * c)
        proj = np.outer(s, np.cos(phi)) * math.sin(chi) + (c * math.cos(chi))[:, None]
        ang = (2.0 * math.pi / m) * np.sum(np.cos(d * proj) ** 2, axis=1)
    return 2.0 * float(np.dot(w, jsq * ang))


def _converge(fn, rtol, channel=None):
    """Double the node count of ``fn(order) -> value`` until stable."""
    order = START_ORDER
    prev = fn(order)
    while True:
        order *= 2
        val = fn(order)
        ref = max(abs(val), abs(prev))
        resid = abs(val - prev) / ref if ref > 0 else 0.0
        if resid < rtol:
            return val, order
        if order >= MAX_ORDER:
            raise ConvergenceError(
                f"quadrature not converged at order {order} (residual {resid:.3g})",
                residual=resid, channel=channel)
        prev = val


def angular_integral(n, g, b, d, chi=0.0, rtol=1e-8, method="auto"):
    """Converged solid-angle integral as (scaled value, scale, node count)."""
    if method not in ("auto", "2d"):
        raise ValueError(f"unknown quadrature method {method!r}")
    scale = bessel_scale(n, g, b)
    val, order = _converge(lambda o: _angular_sum(n, g, b, d, chi, o, method, scale), rtol, n)
    return val, scale, order


# ------------------------------------------------------------------- rates

def rate_prefactor(n: int, k: float, laser: LaserParams, mol: MoleculeModel,
                   coulomb_field: Optional[float] = None) -> float:
    """2 pi C^2 k_N (U_p - N omega)^2 |2 a <k_N|phi>|^2."""
    field_c = laser.field_peak if coulomb_field is None else coulomb_field
    c2 = coulomb_correction(mol.kappa, field_c)
    return (2.0 * math.pi * c2 * k * (laser.up - n * laser.omega) ** 2
            * float(mol.momentum_density(k)))


def differential_rate(k_hat, n: int, laser: LaserParams, mol: MoleculeModel,
                      coulomb_field: Optional[float] = None):
    """Rate per unit solid angle of the emitted electron for direction(s) ``k_hat``.

    ``k_hat`` has shape (3,) or (..., 3) and is normalized here; the
    polarization axis is z and the molecular axis is ``mol.axis``.
    """
    k = channel_kinematics(n, laser, mol.e_ion)
    if k is None:
        raise ValueError(f"channel N={n} is closed")
    kh = np.asarray(k_hat, dtype=float)
    kh = kh / np.linalg.norm(kh, axis=-1, keepdims=True)
    cos_t = kh[..., 2]
    jn = volkov_bessel(n, laser.alpha0 * k * cos_t, laser.bessel_v)
    interf = np.cos(k * (kh @ mol.axis) * mol.r_sep / 2.0) ** 2
    out = rate_prefactor(n, k, laser, mol, coulomb_field) * jn**2 * interf
    return float(out) if out.ndim == 0 else out


def channel_rate(n: int, laser: LaserParams, mol: MoleculeModel, rtol: float = 1e-8,
                 method: str = "auto", coulomb_field: Optional[float] = None) -> float:
    """Gamma_N: N_e times the solid-angle integral of the differential rate.

    ``method="2d"`` forces the tensor-product (cos theta, phi) rule even for
    the parallel and perpendicular orientations.
    """
    k = channel_kinematics(n, laser, mol.e_ion)
    if k is None or laser.field_peak == 0.0:
        return 0.0
    pref = rate_prefactor(n, k, laser, mol, coulomb_field)
    g, b, d = laser.alpha0 * k, laser.bessel_v, mol.r_sep * k / 2.0
    val, scale, _ = angular_integral(n, g, b, d, mol.chi, rtol, method)
    return mol.n_electrons * pref * val * scale * scale


def _auto_channel_list(laser, mol, rtol, coulomb_field, workers):
    n0 = min_open_channel(laser, mol.e_ion)
    cap = n0 + MAX_EXTRA_CHANNELS
    rates: List[float] = []
    peak = 0.0
    n = n0
    batch = max(1, workers)
    with ThreadPoolExecutor(max_workers=batch) as pool:
        while n <= cap:
            ns = list(range(n, min(n + batch, cap + 1)))
            got = list(pool.map(lambda m: channel_rate(m, laser, mol, rtol, "auto", coulomb_field), ns))
            for m, r in zip(ns, got):
                rates.append(r)
                peak = max(peak, r)
                if r < TAIL_CUTOFF * peak and r < peak:
                    return n0, rates[: m - n0 + 1]
            n += batch
    return n0, rates


def ati_spectrum(laser: LaserParams, mol: MoleculeModel, n_max: Optional[int] = None,
                 rtol: float = 1e-8, workers: int = 1,
                 coulomb_field: Optional[float] = None) -> AtiSpectrum:
    """Channel rates from the lowest open N up to ``n_max``.

    With ``n_max=None`` the spectrum stops at the first channel whose rate is
    below 1e-12 of the largest one, at most 200 channels above threshold.
    ``workers > 1`` evaluates channels concurrently; each channel is computed
    independently so the result does not depend on scheduling.
    """
    if laser.field_peak == 0.0:
        return AtiSpectrum([], laser, mol)
    n0 = min_open_channel(laser, mol.e_ion)
    if n_max is None:
        n0, rates = _auto_channel_list(laser, mol, rtol, coulomb_field, workers)
        ns = list(range(n0, n0 + len(rates)))
    else:
        if n_max < n0:
            warnings.warn(f"n_max={n_max} below lowest open channel {n0}; empty spectrum")
            return AtiSpectrum([], laser, mol)
        ns = list(range(n0, n_max + 1))
        fn = lambda m: channel_rate(m, laser, mol, rtol, "auto", coulomb_field)  # noqa: E731
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rates = list(pool.map(fn, ns))
        else:
            rates = [fn(m) for m in ns]
    chans = []
    for m, r in zip(ns, rates):
        k = channel_kinematics(m, laser, mol.e_ion)
        chans.append(AtiChannel(m, k, 0.5 * k * k, r, True))
    return AtiSpectrum(chans, laser, mol)


# ------------------------------------------------------------------ ratios

def ratio_reduced(n: int, g: float, b: float, d: float, rtol: float = 1e-8) -> float:
    """Parallel/perpendicular ratio from the 1D theta integrals in reduced variables.

    numerator   = int_0^pi sin(t) J_N^2(g cos t, b) cos^2(d cos t) dt
    denominator = int_0^pi sin(t) J_N^2(g cos t, b) (1 + J_0(2 d sin t)) / 2 dt
    """
    scale = bessel_scale(n, g, b)

    def both(order):
        c, w = _legendre01(order)
        jsq = _scaled_bessel_sq(n, g, b, c, scale)
        num = float(np.dot(w, jsq * np.cos(d * c) ** 2))
        den = float(np.dot(w, jsq * 0.5 * (1.0 + bessel_j(0, 2.0 * d * np.sqrt(1.0 - c * c)))))
        if den <= 0.0:
            raise NumericalError(f"perpendicular integral underflowed for N={n}")
        return num / den

    x, _ = _converge(both, rtol, n)
    return x


def ratio_exact(n: int, laser: LaserParams, mol: MoleculeModel, rtol: float = 1e-8) -> float:
    """X_N = Gamma_par / Gamma_perp for an open channel, via the 1D reduced form."""
    _, g, b, d = reduced_args(n, laser, mol)
    return ratio_reduced(n, g, b, d, rtol)


def ratio_2d(n: int, laser: LaserParams, mol: MoleculeModel, rtol: float = 1e-8) -> float:
    """X_N from the full two-dimensional solid-angle integrals at chi = 0 and pi/2."""
    _, g, b, d = reduced_args(n, laser, mol)
    par, s_par, _ = angular_integral(n, g, b, d, 0.0, rtol, "2d")
    perp, s_perp, _ = angular_integral(n, g, b, d, _HALF_PI, rtol, "2d")
    if perp <= 0.0:
        raise NumericalError(f"perpendicular integral underflowed for N={n}")
    return par / perp * (s_par / s_perp) ** 2


def ratio_approx(k_n, r_sep: float):
    """Strong-field estimate cos^2(R k / 2) of the ratio."""
    out = np.cos(r_sep * np.asarray(k_n, dtype=float) / 2.0) ** 2
    return float(out) if out.ndim == 0 else out


def interference_minimum_energy(r_sep: float, node: int = 1) -> float:
    """Electron energy of the ``node``-th zero of cos^2(R k / 2): ((2j-1) pi)^2 / (2 R^2)."""
    if not r_sep > 0:
        raise ValueError("no interference minimum for R <= 0")
    return ((2 * node - 1) * math.pi) ** 2 / (2.0 * r_sep**2)


def locate_ratio_minimum(r_sep: float, e_lo: float, e_hi: float) -> float:
    """Energy of the zero of the approximate ratio inside [e_lo, e_hi].

    Root-finds the signed amplitude cos(R sqrt(2E) / 2), which changes sign
    exactly where cos^2 touches zero.
    """
    def amp(e):
        return math.cos(r_sep * math.sqrt(2.0 * e) / 2.0)
    return brentq(amp, e_lo, e_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def ratio_curve(laser: LaserParams, mol: MoleculeModel, n_max: Optional[int] = None,
                rtol: float = 1e-8, workers: int = 1) -> RatioCurve:
    """Exact and approximate ratios for every open channel N_min..n_max."""
    n0 = min_open_channel(laser, mol.e_ion)
    if n_max is None:
        n_max = n0 + 30
    ns = list(range(n0, n_max + 1))
    fn = lambda m: ratio_exact(m, laser, mol, rtol)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            xs = list(pool.map(fn, ns))
    else:
        xs = [fn(m) for m in ns]
    pts = []
    for m, x in zip(ns, xs):
        k = channel_kinematics(m, laser, mol.e_ion)
        pts.append(RatioPoint(m, 0.5 * k * k, x, ratio_approx(k, mol.r_sep)))
    return RatioCurve(pts, mol.r_sep)
