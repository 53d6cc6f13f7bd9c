"""Initial vibrational populations of the ion from the pump pulse.

Ionization of the neutral is treated as a vertical transition with an
R-dependent ionization potential.  The cycle-resolved nonadiabatic rate of
Yudin and Ivanov [PRA 64, 013409 (2001), Eq. 17 with l = m = 0] covers both
the multiphoton and tunnelling regimes; integrating it across the pump
gives the transfer probability density P_trans(R), which is projected onto
the vibrational ladder by the same energy banding that fixes the ensemble
starting points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import dawsn, gammaln

from . import pes, spectrum as spec_mod, units
from .errors import ValidationError
from .pulses import LaserPulse, field_amplitude, total_field  # noqa: F401

# Pump integration window (units of FWHM either side of the peak) and the
# fixed rate-sampling step in fs.
PUMP_WINDOW_FWHM = 2.5
RATE_TIME_STEP_FS = 0.05

# Fields below this (au) contribute nothing at chemically relevant Ip.
FIELD_CUTOFF = 1e-10

_QUAD_THETA = (np.arange(32) + 0.5) / 32.0 * np.pi - 0.5 * np.pi


@dataclass(frozen=True)
class NeutralGroundState:
    """Gaussian model of the neutral vibrational ground state.

    ``width`` is the standard deviation of the probability density
    |psi(R)|^2; the amplitude is psi(R) ~ exp(-(R-center)^2 / (4 width^2)).
    """

    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValidationError("width must be > 0")

    def density(self, r) -> np.ndarray | float:
        x = (np.asarray(r, dtype=float) - self.center) / self.width
        out = np.exp(-0.5 * x * x) / (self.width * math.sqrt(2.0 * math.pi))
        return float(out) if out.ndim == 0 else out

    def amplitude(self, r) -> np.ndarray | float:
        x = (np.asarray(r, dtype=float) - self.center) / self.width
        norm = (2.0 * math.pi * self.width**2) ** -0.25
        out = norm * np.exp(-0.25 * x * x)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class InitialPopulation:
    """Normalized vibrational weights plus relative total-ion measures."""

    weights: np.ndarray
    relative_yield: float = 0.0        # integrated over R, |psi|^2-weighted
    relative_yield_peak: float = 0.0   # rate integral at the |psi|^2 peak

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0.0):
            raise ValidationError("population weights must be >= 0")
        total = w.sum()
        if not math.isclose(total, 1.0, abs_tol=1e-10):
            raise ValidationError(f"weights must sum to 1, got {total}")
        object.__setattr__(self, "weights", w)


def default_neutral_ground(neutral: pes.PotentialSurface,
                           mass: float = units.D2_REDUCED_MASS,
                           center: float = 1.40) -> NeutralGroundState:
    """Ground-state Gaussian with the width of the harmonic level of the
    tabulated neutral curve."""
    r_eq, _ = pes.surface_minimum(neutral)
    dspline, _, _ = pes._derivative_spline(neutral)
    k = float(dspline.derivative()(r_eq))
    omega = math.sqrt(k / mass)
    return NeutralGroundState(center=center, width=1.0 / math.sqrt(2.0 * mass * omega))


def nonadiabatic_rate(field, ip: float, omega: float, instantaneous_phase=0.0):
    """Cycle-resolved Yudin-Ivanov ionization rate (au).

    ``field`` is the envelope amplitude E0 f(t) and ``instantaneous_phase``
    the carrier phase; both may be arrays of a common shape.  Residual
    charge 1 and an s-like initial orbital (l = m = 0) are assumed.
    """
    if ip <= 0.0:
        raise ValidationError("ionization potential must be > 0")
    if omega <= 0.0:
        raise ValidationError("carrier frequency must be > 0")
    e_arr = np.asarray(field, dtype=float)
    if np.any(e_arr < 0.0):
        raise ValidationError("field amplitude must be >= 0")
    phase = np.broadcast_to(np.asarray(instantaneous_phase, dtype=float), e_arr.shape)

    out = np.zeros_like(e_arr, dtype=float)
    live = e_arr > FIELD_CUTOFF
    if np.any(live):
        out[live] = _yi_rate(e_arr[live], ip, omega, phase[live])
    if np.isscalar(field) or np.ndim(field) == 0:
        return float(out)
    return out


def _yi_rate(e: np.ndarray, ip: float, omega: float, phase: np.ndarray) -> np.ndarray:
    nstar = 1.0 / math.sqrt(2.0 * ip)
    gam = omega * math.sqrt(2.0 * ip) / e
    red_field = e * nstar**3

    theta = np.mod(phase - 0.5 * np.pi, np.pi) - 0.5 * np.pi
    sin_t = np.abs(np.sin(theta))
    a = 1.0 + gam * gam - sin_t * sin_t
    b = np.sqrt(a * a + 4.0 * gam * gam * sin_t * sin_t)
    c = np.sqrt((np.sqrt(0.5 * (b + a)) + gam) ** 2
                + (np.sqrt(0.5 * (b - a)) + sin_t) ** 2)
    phi = ((gam * gam + sin_t * sin_t + 0.5) * np.log(c)
           - 3.0 * np.sqrt(0.5 * (b - a)) / 2.0 * sin_t
           - np.sqrt(0.5 * (b + a)) / 2.0 * gam)

    kappa = np.log(gam + np.sqrt(gam * gam + 1.0)) - gam / np.sqrt(1.0 + gam * gam)
    log_a00 = 2.0 * nstar * math.log(2.0) - (
        math.log(nstar) + gammaln(nstar + 1.0) + gammaln(nstar))
    with np.errstate(divide="ignore"):
        log_pre = (
            math.log(ip) + log_a00
            + 0.5 * np.log(3.0 * kappa / gam**3)
            + 0.75 * np.log1p(gam * gam)
            + math.log(4.0 / math.sqrt(3.0 * math.pi))
            + np.log(gam * gam / (1.0 + gam * gam))
            + np.log(_multiphoton_sum(gam, ip, omega))
            + (2.0 * nstar - 1.0) * np.log(2.0 / red_field)
        )
    return np.exp(log_pre - e * e * phi / omega**3)


def _multiphoton_sum(gam: np.ndarray, ip: float, omega: float) -> np.ndarray:
    """Sum over above-threshold photon orders (PPT structure factor)."""
    alpha = 2.0 * (np.arcsinh(gam) - gam / np.sqrt(1.0 + gam * gam))
    beta = 2.0 * gam / np.sqrt(1.0 + gam * gam)
    nu = (ip / omega) * (1.0 + 0.5 / gam**2)
    dnu = np.ceil(nu) - nu
    n_terms = int(min(max(np.max(40.0 / alpha), 5.0), 2.0e6))
    n = np.arange(n_terms, dtype=float)
    x = dnu[..., None] + n
    terms = np.exp(-alpha[..., None] * x) * dawsn(np.sqrt(beta[..., None] * x))
    return terms.sum(axis=-1)


def cycle_averaged_rate(field, ip: float, omega: float):
    """Phase-averaged rate for envelope-mode pulses (32-point quadrature)."""
    e_arr = np.atleast_1d(np.asarray(field, dtype=float))
    acc = np.zeros_like(e_arr)
    for th in _QUAD_THETA:
        acc += nonadiabatic_rate(e_arr, ip, omega, th)
    acc /= len(_QUAD_THETA)
    if np.isscalar(field) or np.ndim(field) == 0:
        return float(acc[0])
    return acc


def rate_integral(pump: LaserPulse, ip: float,
                  dt_fs: float = RATE_TIME_STEP_FS) -> float:
    """Integral of the ionization rate over the pump pulse (dimensionless)."""
    half = PUMP_WINDOW_FWHM * pump.fwhm
    n = int(round(2.0 * half / dt_fs))
    t = pump.center_time - half + dt_fs * np.arange(n + 1)
    env = pump.envelope(t)
    omega = pump.carrier_frequency
    if pump.phase_mode == "carrier":
        rates = nonadiabatic_rate(env, ip, omega, pump.carrier_phase(t))
    else:
        rates = cycle_averaged_rate(env, ip, omega)
    return float(np.trapezoid(rates, dx=dt_fs * units.FS_TO_AU))


def ionization_probability(pump: LaserPulse, ip: float) -> float:
    """Bounded ionization probability 1 - exp(-integral of the rate)."""
    return -math.expm1(-rate_integral(pump, ip))


def transfer_probability(pump: LaserPulse, neutral: pes.PotentialSurface,
                         ion: pes.PotentialSurface, ground: NeutralGroundState,
                         r, channel_offset: float = pes.DEFAULT_CHANNEL_OFFSET):
    """Population-transfer probability density P_ion(R) |psi(R)|^2."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    ips = pes.ionization_potential(neutral, ion, r_arr, channel_offset=channel_offset)
    ips = np.atleast_1d(ips)
    p_ion = np.array([ionization_probability(pump, float(ip)) for ip in ips])
    out = p_ion * ground.density(r_arr)
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out[0])
    return out


def band_edges(spectrum: spec_mod.VibSpectrum, surface: pes.PotentialSurface,
               top_cap: float = 0.0) -> np.ndarray:
    """Inner-branch radii bounding each level's energy band.

    Edge v (descending in R) separates level v-1 from level v; the array
    has v_max + 2 entries: [R_eq, r(m_0), ..., r(m_top)].
    """
    mids = spec_mod.midpoint_energies(spectrum, top_cap=top_cap)
    r_eq, _ = pes.surface_minimum(surface)
    roots = [spec_mod.inner_branch_root(surface, m) for m in mids]
    return np.array([r_eq] + roots)


def project_populations(r: np.ndarray, p_trans: np.ndarray,
                        spectrum: spec_mod.VibSpectrum,
                        surface: pes.PotentialSurface,
                        relative_yield: float = 0.0,
                        relative_yield_peak: float = 0.0) -> InitialPopulation:
    """Project P_trans(R) onto the vibrational ladder by energy banding.

    Level v collects the integral of P_trans over the inner-branch radii
    whose energies lie between the midpoints below and above E_v.  Empty
    bands get zero weight.
    """
    r = np.asarray(r, dtype=float)
    p_trans = np.asarray(p_trans, dtype=float)
    edges = band_edges(spectrum, surface)
    n = len(spectrum.energies)
    weights = np.zeros(n)
    for v in range(n):
        lo, hi = edges[v + 1], edges[v]
        weights[v] = _integrate_window(r, p_trans, lo, hi)
    total = weights.sum()
    if total <= 0.0:
        raise ValidationError("transfer probability vanishes over all bands")
    return InitialPopulation(weights=weights / total,
                             relative_yield=relative_yield,
                             relative_yield_peak=relative_yield_peak)


def _integrate_window(r: np.ndarray, p: np.ndarray, lo: float, hi: float) -> float:
    if hi <= lo or hi <= r[0] or lo >= r[-1]:
        return 0.0
    lo, hi = max(lo, float(r[0])), min(hi, float(r[-1]))
    inside = (r > lo) & (r < hi)
    xs = np.concatenate(([lo], r[inside], [hi]))
    ys = np.concatenate(([np.interp(lo, r, p)], p[inside], [np.interp(hi, r, p)]))
    return float(np.trapezoid(ys, xs))


def populate(pump: LaserPulse, neutral: pes.PotentialSurface,
             ion: pes.PotentialSurface, ground: NeutralGroundState,
             spectrum: spec_mod.VibSpectrum, n_grid: int = 400,
             channel_offset: float = pes.DEFAULT_CHANNEL_OFFSET) -> InitialPopulation:
    """End-to-end initial population for a pump pulse.

    Computes P_trans on a grid spanning the banding range, projects it,
    and attaches the relative-yield measures.
    """
    edges = band_edges(spectrum, ion)
    lo = max(ion.r_min, neutral.r_min, float(edges[-1]) - 0.05)
    hi = min(ion.r_max, neutral.r_max, float(edges[0]) + 0.05)
    r = np.linspace(lo, hi, n_grid)
    ips = np.atleast_1d(pes.ionization_potential(neutral, ion, r,
                                                 channel_offset=channel_offset))
    gamma_int = np.array([rate_integral(pump, float(ip)) for ip in ips])
    p_ion = -np.expm1(-gamma_int)
    p_trans = p_ion * ground.density(r)
    dens = ground.density(r)
    ryield = float(np.trapezoid(dens * gamma_int, r))
    ip_peak = float(pes.ionization_potential(neutral, ion, ground.center,
                                             channel_offset=channel_offset))
    ryield_peak = rate_integral(pump, ip_peak)
    return project_populations(r, p_trans, spectrum, ion,
                               relative_yield=ryield,
                               relative_yield_peak=ryield_peak)


def franck_condon_reference(neutral_ground: NeutralGroundState,
                            spectrum: spec_mod.VibSpectrum) -> InitialPopulation:
    """Franck-Condon weights |<chi_v | psi_0>|^2, normalized."""
    psi = neutral_ground.amplitude(spectrum.grid)
    overlaps = np.trapezoid(spectrum.wavefunctions * psi, dx=spectrum.grid_step, axis=1)
    w = overlaps**2
    return InitialPopulation(weights=w / w.sum())
