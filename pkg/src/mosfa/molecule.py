"""Two-center LCAO model of a homonuclear diatomic HOMO.

The bonding orbital is a normalized sum of two hydrogen-like 1s orbitals
with exponent kappa = sqrt(2 E_ion), sitting at +-R/2 along the molecular
axis. The orientation angle chi is measured from the polarization axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def kappa_from_eion(e_ion: float) -> float:
    if not e_ion > 0:
        raise ValueError(f"ionization energy must be positive, got {e_ion}")
    return math.sqrt(2.0 * e_ion)


def s_orbital_ft(k, kappa: float):
    """Momentum-space amplitude of the normalized 1s orbital sqrt(kappa^3/pi) e^(-kappa r).

    Uses the unitary convention (2 pi)^(-3/2) for the transform, so the
    squared amplitude integrates to one over d^3k.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return 2.0 * math.sqrt(2.0) / math.pi * kappa**2.5 / (np.square(k) + kappa**2) ** 2


def lcao_overlap(kappa: float, r_sep: float) -> float:
    """1s-1s overlap exp(-x)(1 + x + x^2/3) with x = kappa R."""
    x = kappa * r_sep
    return math.exp(-x) * (1.0 + x + x * x / 3.0)


def lcao_norm(overlap: float) -> float:
    if not -1.0 < overlap <= 1.0:
        raise ValueError(f"overlap must lie in (-1, 1], got {overlap}")
    return 1.0 / math.sqrt(2.0 * (1.0 + overlap))


@dataclass(frozen=True)
class MoleculeModel:
    """Homonuclear diatomic with an s-type bonding HOMO.

    Parameters
    ----------
    r_sep : float
        Internuclear separation R in bohr. ``0`` is allowed (atomic limit).
    e_ion : float
        Ionization energy in hartree; fixes the orbital exponent.
    n_electrons : int
        Occupation of the HOMO.
    chi : float
        Angle between molecular axis and polarization axis, radians.
    """

    r_sep: float
    e_ion: float
    n_electrons: int = 2
    chi: float = 0.0
    kappa: float = field(init=False)
    overlap: float = field(init=False)
    norm_a: float = field(init=False)

    def __post_init__(self):
        if not self.r_sep >= 0:
            raise ValueError(f"R must be nonnegative, got {self.r_sep}")
        if not 0.0 <= self.chi <= math.pi / 2 + 1e-12:
            raise ValueError(f"chi must lie in [0, pi/2], got {self.chi}")
        kappa = kappa_from_eion(self.e_ion)
        overlap = lcao_overlap(kappa, self.r_sep)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "overlap", overlap)
        object.__setattr__(self, "norm_a", lcao_norm(overlap))

    @classmethod
    def from_config(cls, R_bohr, E_ion_hartree, N_e=2, chi_deg=0.0):
        return cls(float(R_bohr), float(E_ion_hartree), int(N_e), math.radians(float(chi_deg)))

    def oriented(self, chi: float) -> "MoleculeModel":
        return MoleculeModel(self.r_sep, self.e_ion, self.n_electrons, chi)

    @property
    def axis(self) -> np.ndarray:
        """Unit vector along the molecular axis, polarization along z."""
        return np.array([math.sin(self.chi), 0.0, math.cos(self.chi)])

    def momentum_density(self, k) -> np.ndarray:
        """|2 a <k|phi>|^2, the orientation-independent part of the structure factor."""
        return (2.0 * self.norm_a * s_orbital_ft(k, self.kappa)) ** 2


def momentum_norm(kappa: float, r_sep: float, n_k: int = 200, n_c: int = 200) -> float:
    """Norm of the LCAO orbital in momentum space by 2D Gauss-Legendre quadrature.

    Integrates |2 a <k|phi> cos(k.R/2)|^2 over k in [0, inf) and cos(theta)
    in [-1, 1] with R along z; the azimuth is trivial.
    """
    a = lcao_norm(lcao_overlap(kappa, r_sep))
    t, wt = np.polynomial.legendre.leggauss(n_k)
    # map [-1, 1] -> [0, inf): k = kappa (1 + t) / (1 - t)
    k = kappa * (1.0 + t) / (1.0 - t)
    dk = kappa * 2.0 / (1.0 - t) ** 2
    c, wc = np.polynomial.legendre.leggauss(n_c)
    amp2 = (2.0 * a * s_orbital_ft(k, kappa)) ** 2
    interf = np.cos(np.outer(k, c) * r_sep / 2.0) ** 2
    inner = interf @ wc
    return float(2.0 * math.pi * np.sum(wt * dk * k**2 * amp2 * inner))
