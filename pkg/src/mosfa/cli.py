"""Command-line entry point: ``mosfa <command> --config run.yaml``.

Commands return their CSV (or report) text so they can be called directly;
``main`` adds file output and exit codes (0 ok, 2 config or domain error,
3 numerical non-convergence).
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from mosfa import __version__
from mosfa.config import ConfigError, RunConfig, parse_config
from mosfa.csvio import ExternalCurve, format_table, header_lines, read_external, read_table
from mosfa.pulse_yield import RateTable, YieldCurve, _safe_ratio, focal_average, ratio_scan, yield_curve
from mosfa.sfa_rates import (NumericalError, ati_spectrum, channel_kinematics, min_open_channel,
                              ratio_approx, ratio_curve)
from mosfa.specialfn import bessel_j, gen_bessel_row, parseval_cut
from mosfa.units import HARTREE_EV, intensity_to_field

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
OVERLAY_POINTS = 400


def _header(command: str, cfg: Optional[RunConfig], extra=None):
    return header_lines(command, __version__, cfg.flat() if cfg else None, extra)


def intensity_grid(cfg: RunConfig) -> np.ndarray:
    s = cfg.scan
    if s.i_min is None or s.i_max is None:
        raise ConfigError("this command needs scan.i_min and scan.i_max (or --i-min/--i-max)")
    if s.i_min == s.i_max:
        return np.array([s.i_min])
    if s.n_points < 2:
        raise ConfigError("scan.n_points must be at least 2 when i_min < i_max")
    return np.geomspace(s.i_min, s.i_max, s.n_points)


# ------------------------------------------------------------------ commands

def _spectra(cfg: RunConfig, chis):
    laser = cfg.laser_params()
    base = cfg.molecule_model()
    num = cfg.numerics
    kw = dict(rtol=num.rtol, workers=num.workers)
    specs = [ati_spectrum(laser, base.oriented(c), num.n_max, **kw) for c in chis]
    if num.n_max is None:
        # automatic tails can stop at different N; extend all to the longest
        top = max((s.channels[-1].n_photons for s in specs if s.channels), default=None)
        specs = [s if not s.channels or s.channels[-1].n_photons == top
                 else ati_spectrum(laser, base.oriented(c), top, **kw) for s, c in zip(specs, chis)]
    return specs


def cmd_spectrum(cfg: RunConfig) -> str:
    """Channel rates for parallel and perpendicular alignment (plus chi if oblique)."""
    chi = math.radians(cfg.molecule.chi_deg)
    chis = [0.0, math.pi / 2]
    oblique = cfg.molecule.chi_deg not in (0.0, 90.0)
    if oblique:
        chis.append(chi)
    specs = _spectra(cfg, chis)
    cols = ["N", "energy_hartree", "energy_eV", "rate_parallel_au", "rate_perpendicular_au"]
    if oblique:
        cols.append("rate_chi_au")
    rows = []
    for chans in zip(*(s.channels for s in specs)):
        c0 = chans[0]
        rows.append([c0.n_photons, c0.energy, c0.energy * HARTREE_EV] + [c.rate for c in chans])
    laser = cfg.laser_params()
    extra = {"derived.omega": repr(laser.omega), "derived.field_au": repr(laser.field_peak),
             "derived.Up": repr(laser.up)}
    return format_table(cols, rows, _header("spectrum", cfg, extra), cfg.output.precision)


def cmd_ratio(cfg: RunConfig) -> str:
    """Exact and strong-field ratios per channel."""
    laser = cfg.laser_params()
    mol = cfg.molecule_model()
    curve = ratio_curve(laser, mol, cfg.numerics.n_max, cfg.numerics.rtol, cfg.numerics.workers)
    rows = [[p.n_photons, p.energy * HARTREE_EV, p.x_exact, p.x_approx] for p in curve.points]
    return format_table(["N", "energy_eV", "x_exact", "x_approx"], rows,
                        _header("ratio", cfg), cfg.output.precision)


def cmd_ratio_overlay(cfg: RunConfig) -> str:
    """Dense cos^2(R k / 2) curve over the energy range of ``cmd_ratio``."""
    laser = cfg.laser_params()
    mol = cfg.molecule_model()
    n0 = min_open_channel(laser, mol.e_ion)
    n1 = cfg.numerics.n_max if cfg.numerics.n_max is not None else n0 + 30
    e_lo = 0.5 * channel_kinematics(n0, laser, mol.e_ion) ** 2
    e_hi = 0.5 * channel_kinematics(max(n1, n0), laser, mol.e_ion) ** 2
    energies = np.linspace(e_lo, e_hi, OVERLAY_POINTS)
    vals = ratio_approx(np.sqrt(2.0 * energies), mol.r_sep)
    rows = [[e * HARTREE_EV, x] for e, x in zip(energies, vals)]
    return format_table(["energy_eV", "cos2_Rk_half"], rows,
                        _header("ratio-overlay", cfg), cfg.output.precision)


def _yield_curves(cfg: RunConfig, grid: np.ndarray) -> List[YieldCurve]:
    mol = cfg.molecule_model()
    num = cfg.numerics
    f_hi = intensity_to_field(grid[-1])
    f_lo = 0.1 * intensity_to_field(grid[0])
    curves = []
    for chi in (0.0, math.pi / 2):
        m = mol.oriented(chi)
        table = RateTable.build(cfg.omega, m, f_hi, f_lo, num.field_grid_points, num.rtol, num.workers)
        curves.append(yield_curve(grid, m, cfg.omega, cfg.pulse.n_cycles, table, num.coulomb_field))
    return curves


def cmd_yield(cfg: RunConfig) -> str:
    """Pulse yields for both alignments over the configured intensity grid."""
    grid = intensity_grid(cfg)
    par, perp = _yield_curves(cfg, grid)
    ratio = _safe_ratio(par.yields, perp.yields, 1.0)
    rows = [list(r) for r in zip(grid, par.yields, perp.yields, ratio)]
    return format_table(["intensity_Wcm2", "yield_parallel", "yield_perpendicular", "ratio"],
                        rows, _header("yield", cfg), cfg.output.precision)


def _covered_peaks(curve: YieldCurve, fraction: float) -> np.ndarray:
    i = curve.intensities
    lo = i[0] * (1.0 - 1e-12)
    return i[fraction * i >= lo]


def _focal_pair(par, perp, peaks, fraction):
    sp = np.array([focal_average(par, i0, fraction * i0) for i0 in peaks])
    sq = np.array([focal_average(perp, i0, fraction * i0) for i0 in peaks])
    return sp, sq


def cmd_focal(cfg: RunConfig, yields_path=None, parallel: Optional[ExternalCurve] = None,
              perpendicular: Optional[ExternalCurve] = None,
              compare: Sequence[ExternalCurve] = ()) -> str:
    """Focal-volume averaged parallel/perpendicular ratio.

    Yields come from the model (config scan grid), from a ``cmd_yield`` CSV
    (``yields_path``) or from a pair of external curves. Peaks are every
    grid intensity whose focal cutoff lies inside the yield data. ``compare``
    curves are interpolated onto the peaks as extra columns.
    """
    frac = cfg.numerics.focal_imin_fraction
    scale = cfg.scan.rescale
    extra = {}
    if (parallel is None) != (perpendicular is None):
        raise ConfigError("external yields need both a parallel and a perpendicular curve")
    if parallel is not None:
        par = YieldCurve(parallel.intensities, parallel.scaled, 0.0, probability=False)
        perp = YieldCurve(perpendicular.intensities, perpendicular.scaled, math.pi / 2,
                          probability=False)
        peaks = _covered_peaks(par, frac)
        peaks = peaks[peaks * frac >= perp.intensities[0] * (1.0 - 1e-12)]
        peaks = peaks[peaks <= perp.intensities[-1]]
        extra["source"] = f"external {parallel.label} / {perpendicular.label}"
    elif yields_path is not None:
        tab = read_table(yields_path)
        grid = tab["intensity_Wcm2"]
        par = YieldCurve(grid, tab["yield_parallel"], chi=0.0)
        perp = YieldCurve(grid, tab["yield_perpendicular"], chi=math.pi / 2)
        peaks = _covered_peaks(par, frac)
        extra["source"] = f"yields {yields_path}"
    else:
        peaks = intensity_grid(cfg)
        num = cfg.numerics
        scan = ratio_scan(peaks, cfg.molecule_model(), cfg.omega, cfg.pulse.n_cycles, True, scale,
                          frac, num.field_grid_points, num.yield_grid_points, num.coulomb_field,
                          num.rtol, num.workers)
        sp, sq = scan.signal_parallel, scan.signal_perpendicular
        par = None
        extra["source"] = "model"
    if peaks.size == 0:
        raise ConfigError(f"no peak intensity has its focal cutoff (fraction {frac}) inside the yield data")
    if par is not None:
        sp, sq = _focal_pair(par, perp, peaks, frac)
    ratio = _safe_ratio(sp, sq, scale)
    cols = ["intensity_Wcm2", "signal_parallel", "signal_perpendicular", "ratio"]
    rows = [list(r) for r in zip(peaks, sp, sq, ratio)]
    for c in compare:
        cols.append(c.label)
        extra[f"compare.{c.label}.scale"] = repr(c.scale)
        vals = c.at(peaks)
        for row, v in zip(rows, np.atleast_1d(vals)):
            row.append(v)
    return format_table(cols, rows, _header("focal", cfg, extra), cfg.output.precision)


def cmd_bessel_check(u: float, v: float, n_min: int, n_max: int) -> str:
    """Diagnostics for the generalized Bessel functions at one (u, v)."""
    cut = parseval_cut(u, v)
    full = gen_bessel_row(-cut, cut, u, v)
    parseval = abs(math.fsum(full**2) - 1.0)
    lo, hi = n_min - 2, n_max + 2
    row = gen_bessel_row(lo, hi, u, v)
    j = {n: row[n - lo] for n in range(lo, hi + 1)}
    # 2n J_n = u (J_{n-1} + J_{n+1}) + 2 v (J_{n-2} + J_{n+2})
    rec = max(abs(2 * n * j[n] - u * (j[n - 1] + j[n + 1]) - 2 * v * (j[n - 2] + j[n + 2]))
              for n in range(n_min, n_max + 1))
    red = gen_bessel_row(n_min, n_max, u, 0.0)
    v0 = max(abs(red[i] - bessel_j(n, u)) for i, n in enumerate(range(n_min, n_max + 1)))
    lines = [f"# mosfa {__version__} bessel-check",
             f"u = {u!r}", f"v = {v!r}", f"n_range = [{n_min}, {n_max}]",
             f"parseval_residual = {parseval:.3e}",
             f"recurrence_max_residual = {rec:.3e}",
             f"v0_reduction_max_error = {v0:.3e}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mosfa", description="Velocity-gauge molecular SFA for homonuclear diatomics.")
    p.add_argument("--version", action="version", version=f"mosfa {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scan=False):
        sp.add_argument("--config", required=True, help="YAML run configuration")
        sp.add_argument("--out", help="output CSV path (default stdout)")
        sp.add_argument("--chi", type=float, help="orientation in degrees, overrides molecule.chi_deg")
        if scan:
            sp.add_argument("--i-min", type=float, help="lowest peak intensity, W/cm^2")
            sp.add_argument("--i-max", type=float, help="highest peak intensity, W/cm^2")
            sp.add_argument("--n-points", type=int, help="number of peak intensities")
            sp.add_argument("--scale", type=float, help="factor applied to ratios")

    common(sub.add_parser("spectrum", help="channel rates for both alignments"))
    sp = sub.add_parser("ratio", help="exact and approximate parallel/perpendicular ratios")
    common(sp)
    sp.add_argument("--overlay", help="also write the dense cos^2(Rk/2) curve here")
    common(sub.add_parser("yield", help="pulse yields over an intensity grid"), scan=True)
    sp = sub.add_parser("focal", help="focal-volume averaged ratio")
    common(sp, scan=True)
    sp.add_argument("--yields", help="CSV written by the yield command")
    sp.add_argument("--parallel", help="external 2-column parallel yield curve")
    sp.add_argument("--perpendicular", help="external 2-column perpendicular yield curve")
    sp.add_argument("--compare", action="append", default=[], help="external curve to align (repeatable)")
    sp = sub.add_parser("bessel-check", help="generalized Bessel diagnostics")
    sp.add_argument("--u", type=float, default=10.0)
    sp.add_argument("--v", type=float, default=2.0)
    sp.add_argument("--n-min", type=int, default=-40)
    sp.add_argument("--n-max", type=int, default=40)
    sp.add_argument("--out")
    return p


def _resolve(args) -> RunConfig:
    cfg = parse_config(args.config)
    if args.chi is not None:
        cfg = cfg.replace("molecule", chi_deg=args.chi)
    scan = {k: getattr(args, a) for k, a in (("i_min", "i_min"), ("i_max", "i_max"),
                                             ("n_points", "n_points"), ("rescale", "scale"))
            if getattr(args, a, None) is not None}
    if scan:
        cfg = cfg.replace("scan", **scan)
    if args.out is not None:
        cfg = cfg.replace("output", path=args.out)
    return cfg


def _emit(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(args) -> None:
    if args.command == "bessel-check":
        if args.n_min > args.n_max:
            raise ConfigError("--n-min must not exceed --n-max")
        _emit(cmd_bessel_check(args.u, args.v, args.n_min, args.n_max), args.out)
        return
    cfg = _resolve(args)
    if args.command == "spectrum":
        text = cmd_spectrum(cfg)
    elif args.command == "ratio":
        text = cmd_ratio(cfg)
        if args.overlay:
            _emit(cmd_ratio_overlay(cfg), args.overlay)
    elif args.command == "yield":
        text = cmd_yield(cfg)
    else:
        ext = [read_external(p) if p else None for p in (args.parallel, args.perpendicular)]
        text = cmd_focal(cfg, args.yields, ext[0], ext[1], [read_external(p) for p in args.compare])
    _emit(text, cfg.output.path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except NumericalError as exc:
        print(f"mosfa: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"mosfa: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
