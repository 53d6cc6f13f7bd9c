"""Gaussian-envelope laser pulses and their electric fields.

Pulses are specified the way they are quoted in the lab: peak intensity in
W cm^-2 and intensity FWHM in fs.  ``field_amplitude`` returns the field in
atomic units; ``total_field`` sums any number of pulses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import units
from .errors import ValidationError

FOUR_LN2 = 4.0 * math.log(2.0)

# Half-width (in units of the FWHM) at which the intensity envelope has
# fallen to 1e-3 of its peak; used as the "pulse is over" boundary.
OFF_FRACTION = math.sqrt(math.log(1e3) / FOUR_LN2)


@dataclass(frozen=True)
class LaserPulse:
    """NIR pulse with a Gaussian intensity envelope.

    ``phase_mode`` selects between the non-negative envelope field and the
    carrier-resolved field E_env(t) * cos(w (t - t0)).  A tabulated field
    (t_fs, E_au) overrides the analytic form when present.
    """

    peak_intensity: float                       # W cm^-2
    fwhm: float                                 # fs, intensity FWHM
    center_time: float = 0.0                    # fs
    wavelength: float = 800.0                   # nm
    phase_mode: str = "envelope"                # "envelope" | "carrier"
    tabulated: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if self.peak_intensity <= 0.0:
            raise ValidationError("peak_intensity must be > 0")
        if self.fwhm <= 0.0:
            raise ValidationError("fwhm must be > 0")
        if self.wavelength <= 0.0:
            raise ValidationError("wavelength must be > 0")
        if self.phase_mode not in ("envelope", "carrier"):
            raise ValidationError(f"unknown phase_mode {self.phase_mode!r}")
        if self.tabulated is not None:
            t, e = self.tabulated
            t = np.asarray(t, dtype=float)
            e = np.asarray(e, dtype=float)
            if t.shape != e.shape or t.ndim != 1:
                raise ValidationError("tabulated field needs matching 1-d arrays")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(e))):
                raise ValidationError("tabulated field must be finite")
            if np.any(np.diff(t) <= 0.0):
                raise ValidationError("tabulated field times must be sorted")
            object.__setattr__(self, "tabulated", (t, e))

    @property
    def peak_field(self) -> float:
        """Peak field amplitude in au."""
        return units.field_from_intensity(self.peak_intensity)

    @property
    def carrier_frequency(self) -> float:
        """Carrier angular frequency in au."""
        return units.angular_frequency(self.wavelength)

    @property
    def start_time(self) -> float:
        """Time (fs) at which the intensity rises above 1e-3 of peak."""
        return self.center_time - OFF_FRACTION * self.fwhm

    @property
    def end_time(self) -> float:
        """Time (fs) at which the intensity has fallen below 1e-3 of peak."""
        return self.center_time + OFF_FRACTION * self.fwhm

    def envelope(self, t_fs) -> np.ndarray | float:
        """Field envelope (au) at time t (fs): sqrt of the intensity envelope."""
        tau = np.asarray(t_fs, dtype=float) - self.center_time
        out = self.peak_field * np.exp(-0.5 * FOUR_LN2 * (tau / self.fwhm) ** 2)
        return float(out) if out.ndim == 0 else out

    def carrier_phase(self, t_fs) -> np.ndarray | float:
        """Instantaneous carrier phase w (t - t0) in rad (t in fs)."""
        tau = (np.asarray(t_fs, dtype=float) - self.center_time) * units.FS_TO_AU
        out = self.carrier_frequency * tau
        return float(out) if out.ndim == 0 else out


def field_amplitude(pulse: LaserPulse, t_fs) -> np.ndarray | float:
    """Electric field (au) of the pulse at time t (fs).

    Envelope mode returns the non-negative envelope; carrier mode
    multiplies by cos(w (t - t0)).  A tabulated field takes precedence and
    is interpolated linearly (zero outside its samples).
    """
    if pulse.tabulated is not None:
        t, e = pulse.tabulated
        out = np.interp(np.asarray(t_fs, dtype=float), t, e, left=0.0, right=0.0)
        return float(out) if out.ndim == 0 else out
    env = pulse.envelope(t_fs)
    if pulse.phase_mode == "carrier":
        return env * np.cos(pulse.carrier_phase(t_fs))
    return env


def total_field(pulses: Sequence[LaserPulse], t_fs) -> np.ndarray | float:
    """Sum of the field amplitudes of all pulses at time t (fs)."""
    if not pulses:
        out = np.zeros_like(np.asarray(t_fs, dtype=float))
        return float(out) if out.ndim == 0 else out
    out = field_amplitude(pulses[0], t_fs)
    for p in pulses[1:]:
        out = out + field_amplitude(p, t_fs)
    return out
