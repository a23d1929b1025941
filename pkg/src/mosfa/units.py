"""Atomic-unit conversions and laser-field parameters.

All physics in this package runs in Hartree atomic units. Wavelengths (nm),
intensities (W/cm^2) and energies in eV only appear at the I/O boundary and
are converted here with the frozen constants below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

# frozen conversion constants; echoed into every output header
NM_HARTREE = 45.563353  # omega[hartree] * lambda[nm]
INTENSITY_AU = 3.50945e16  # W/cm^2 for unit field amplitude
HARTREE_EV = 27.211386

CONSTANTS = {
    "nm_hartree": NM_HARTREE,
    "intensity_au_Wcm2": INTENSITY_AU,
    "hartree_eV": HARTREE_EV,
}


@dataclass(frozen=True)
class LaserParams:
    """Monochromatic linearly polarized field, atomic units.

    ``up`` and ``alpha0`` are derived in ``__post_init__`` and cannot be
    passed in, so they always agree with ``field_peak`` and ``omega``.
    """

    omega: float
    field_peak: float
    wavelength: Optional[float] = None
    intensity: Optional[float] = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.field_peak >= 0:
            raise ValueError(f"field_peak must be nonnegative, got {self.field_peak}")

    @property
    def up(self) -> float:
        """Ponderomotive energy F^2 / (4 omega^2)."""
        return self.field_peak**2 / (4.0 * self.omega**2)

    @property
    def alpha0(self) -> float:
        """Classical quiver amplitude F / omega^2."""
        return self.field_peak / self.omega**2

    @property
    def bessel_v(self) -> float:
        """Second generalized-Bessel argument U_p / (2 omega)."""
        return self.up / (2.0 * self.omega)

    def with_field(self, field: float) -> "LaserParams":
        return LaserParams(self.omega, field, wavelength=self.wavelength,
                           intensity=field_to_intensity(field))


def wavelength_to_omega(wavelength_nm: float) -> float:
    if not wavelength_nm > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    return NM_HARTREE / wavelength_nm


def omega_to_wavelength(omega: float) -> float:
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return NM_HARTREE / omega


def intensity_to_field(intensity: float) -> float:
    """Peak field amplitude (a.u.) for a peak intensity in W/cm^2."""
    if intensity < 0:
        raise ValueError(f"intensity must be nonnegative, got {intensity}")
    return math.sqrt(intensity / INTENSITY_AU)


def field_to_intensity(field: float) -> float:
    return field * field * INTENSITY_AU


def derive_params(field: float, omega: float) -> LaserParams:
    return LaserParams(omega=omega, field_peak=field, wavelength=NM_HARTREE / omega,
                       intensity=field_to_intensity(field))


def laser_from_lab(wavelength_nm: float, intensity_wcm2: float) -> LaserParams:
    omega = wavelength_to_omega(wavelength_nm)
    return LaserParams(omega, intensity_to_field(intensity_wcm2),
                       wavelength=wavelength_nm, intensity=intensity_wcm2)


def coulomb_correction(kappa: float, field: float) -> float:
    """Coulomb correction factor (kappa^3 / F)^(2 / kappa)."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if not field > 0:
        raise ValueError("Coulomb correction diverges for zero field")
    return (kappa**3 / field) ** (2.0 / kappa)


def hartree_to_ev(energy):
    return energy * HARTREE_EV
