"""Unit conventions and conversion constants.

All internal computation is in Hartree atomic units (hbar = m_e = e = 1).
The public interfaces use the mixed units conventional in strong-field
experiments: intensities in W cm^-2, times in fs, lengths in bohr (au).
"""

import math

# 1 atomic unit of time in femtoseconds.
AU_TIME_FS = 0.02418884326585747
FS_TO_AU = 1.0 / AU_TIME_FS

# Intensity (W cm^-2) that corresponds to a field of 1 au.
INTENSITY_AU_WCM2 = 3.50945e16

# Speed of light and bohr radius for photon-energy conversion.
C_AU = 137.035999084
BOHR_PER_NM = 1.0e-9 / 5.29177210903e-11

# Reduced mass of the two-deuteron system in electron masses
# (deuteron mass 3670.48 m_e / 2).  Used for both D2 and D2+.
D2_REDUCED_MASS = 1835.24


def fs_to_au(t_fs: float) -> float:
    """Convert a time from fs to atomic units."""
    return t_fs * FS_TO_AU


def au_to_fs(t_au: float) -> float:
    """Convert a time from atomic units to fs."""
    return t_au * AU_TIME_FS


def field_from_intensity(intensity_wcm2: float) -> float:
    """Peak electric field (au) for a given intensity (W cm^-2)."""
    return math.sqrt(intensity_wcm2 / INTENSITY_AU_WCM2)


def intensity_from_field(field_au: float) -> float:
    """Intensity (W cm^-2) for a given field amplitude (au)."""
    return field_au * field_au * INTENSITY_AU_WCM2


def angular_frequency(wavelength_nm: float) -> float:
    """Carrier angular frequency (au) of light of the given wavelength."""
    return 2.0 * math.pi * C_AU / (wavelength_nm * BOHR_PER_NM)
