"""Velocity-gauge molecular strong-field approximation for homonuclear diatomics.

Alignment-dependent N-photon rates, ATI spectra, parallel/perpendicular
interference ratios, pulse yields and focal-volume averaged ratio curves.
Everything inside the package works in Hartree atomic units.
"""

__version__ = "0.1.0"

from mosfa.units import LaserParams, derive_params, intensity_to_field, wavelength_to_omega
from mosfa.molecule import MoleculeModel
from mosfa.specialfn import bessel_j, gen_bessel, gen_bessel_row
from mosfa.sfa_rates import (
    AtiChannel,
    AtiSpectrum,
    RatioCurve,
    ati_spectrum,
    channel_rate,
    ratio_approx,
    ratio_curve,
    ratio_exact,
)
from mosfa.pulse_yield import PulseSpec, YieldCurve, focal_average, pulse_yield, ratio_scan

__all__ = [
    "AtiChannel",
    "AtiSpectrum",
    "LaserParams",
    "MoleculeModel",
    "PulseSpec",
    "RatioCurve",
    "YieldCurve",
    "ati_spectrum",
    "bessel_j",
    "channel_rate",
    "derive_params",
    "focal_average",
    "gen_bessel",
    "gen_bessel_row",
    "intensity_to_field",
    "pulse_yield",
    "ratio_approx",
    "ratio_curve",
    "ratio_exact",
    "ratio_scan",
    "wavelength_to_omega",
]
