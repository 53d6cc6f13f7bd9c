"""Propagation of the weighted classical ensemble.

Each element is an independent point mass on the (possibly laser-dressed)
potential curve, integrated with symplectic velocity-Verlet substeps.  The
default integrator is the 4th-order triple-Verlet composition; plain
velocity Verlet is available via ``PropagationConfig(integrator="verlet")``.

While a pulse is on, the force is rebuilt from the instantaneous dressed
potential: the dressed curve is evaluated on the uniform working grid, a
five-point stencil gives its derivative, and a natural spline interpolates
to the element positions.  The rebuild is skipped while the field changes
by less than 1e-6 au between evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import pes, units
from .errors import IntegratorError, ValidationError
from .pulses import LaserPulse, total_field  # re-exported; see pulses module

BOUND = "bound"
DISSOCIATED = "dissociated"

# field change (au) below which the dressed force is not rebuilt
FIELD_REBUILD_THRESHOLD = 1e-6

# Yoshida triple-jump coefficients for the 4th-order composition
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1


@dataclass
class EnsembleElement:
    """One weighted classical particle labelled by its initial level."""

    v_label: int
    r: float                 # au
    velocity: float = 0.0    # au / au-time
    weight: float = 1.0
    status: str = BOUND

    def __post_init__(self):
        if self.weight < 0.0:
            raise ValidationError("weight must be >= 0")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded time series of one element.

    Positions and velocities are NaN from the first recorded step after
    dissociation onward.
    """

    v_label: int
    weight: float
    times: np.ndarray        # fs, uniformly spaced
    positions: np.ndarray    # au
    velocities: np.ndarray   # au / au-time
    dissociated_at: int | None = None   # index into times, or None

    @property
    def statuses(self) -> np.ndarray:
        out = np.full(len(self.times), BOUND, dtype=object)
        if self.dissociated_at is not None:
            out[self.dissociated_at:] = DISSOCIATED
        return out

    @property
    def is_dissociated(self) -> bool:
        return self.dissociated_at is not None


@dataclass(frozen=True)
class PropagationConfig:
    dt: float = 0.1                   # fs
    t_end: float = 100.0              # fs
    dissociation_radius: float = 10.0  # au
    record_stride: int = 1
    mass: float = units.D2_REDUCED_MASS
    integrator: str = "yoshida4"      # "yoshida4" | "verlet"

    def __post_init__(self):
        if self.dt <= 0.0 or self.t_end <= 0.0:
            raise ValidationError("dt and t_end must be > 0")
        if self.record_stride < 1:
            raise ValidationError("record_stride must be >= 1")
        if self.mass <= 0.0:
            raise ValidationError("mass must be > 0")
        if self.integrator not in ("yoshida4", "verlet"):
            raise ValidationError(f"unknown integrator {self.integrator!r}")


class _ForceField:
    """Acceleration provider with dressed-surface caching."""

    def __init__(self, bound: pes.PotentialSurface,
                 repulsive: pes.PotentialSurface | None,
                 pulses: Sequence[LaserPulse], mass: float):
        self.mass = mass
        self.pulses = list(pulses)
        self.grid = pes.working_grid(bound)
        self.h = float(self.grid[1] - self.grid[0])
        self.vg = bound.interpolant(self.grid)
        self.static_spline = CubicSpline(self.grid[2:-2],
                                         pes.stencil_derivative(self.vg, self.h),
                                         bc_type="natural")
        self.lo = float(self.grid[2])
        self.hi = float(self.grid[-3])
        if self.pulses:
            if repulsive is None:
                raise ValidationError("pulses present but no repulsive surface given")
            self.vu = repulsive.interpolant(self.grid)
        self._last_field = 0.0
        self._dressed_spline = None

    def field_at(self, t_fs: float) -> float:
        if not self.pulses:
            return 0.0
        return abs(float(total_field(self.pulses, t_fs)))

    def _spline_for(self, eps: float) -> CubicSpline:
        if eps == 0.0:
            return self.static_spline
        if self._dressed_spline is None or abs(eps - self._last_field) > FIELD_REBUILD_THRESHOLD:
            vd = pes.dressed_values(self.vg, self.vu, self.grid, eps)
            self._dressed_spline = CubicSpline(self.grid[2:-2],
                                               pes.stencil_derivative(vd, self.h),
                                               bc_type="natural")
            self._last_field = eps
        return self._dressed_spline

    def acceleration(self, r: np.ndarray, t_fs: float) -> np.ndarray:
        if np.any(r < self.lo):
            raise IntegratorError(
                f"element reached R = {float(np.min(r)):.4f} au, below the "
                "valid grid; check the surface or reduce dt")
        if np.any(r > self.hi):
            raise IntegratorError(
                f"element reached R = {float(np.max(r)):.4f} au, beyond the "
                "tabulated grid; dissociation_radius should be smaller")
        spline = self._spline_for(self.field_at(t_fs))
        return -spline(r) / self.mass


def propagate(elements: Sequence[EnsembleElement],
              bound: pes.PotentialSurface,
              repulsive: pes.PotentialSurface | None,
              pulses: Sequence[LaserPulse],
              config: PropagationConfig) -> list[Trajectory]:
    """Integrate all elements through the pulse sequence.

    Elements never interact; identical per-element results are produced
    whether elements are propagated singly or batched.
    """
    if config.dissociation_radius >= bound.r_max:
        raise ValidationError("dissociation_radius must lie inside the surface grid")
    ff = _ForceField(bound, repulsive, pulses, config.mass)

    n_steps = int(round(config.t_end / config.dt))
    rec_idx = np.arange(0, n_steps + 1, config.record_stride)
    n_rec = len(rec_idx)
    n_el = len(elements)

    r = np.array([e.r for e in elements], dtype=float)
    v = np.array([e.velocity for e in elements], dtype=float)
    alive = np.array([e.status == BOUND for e in elements], dtype=bool)
    diss_step = np.full(n_el, -1, dtype=int)
    diss_step[~alive] = 0

    pos = np.full((n_rec, n_el), np.nan)
    vel = np.full((n_rec, n_el), np.nan)

    dt_au = config.dt * units.FS_TO_AU
    radius = config.dissociation_radius
    pulses_end = max((p.end_time for p in pulses), default=-np.inf)
    energy_checked = False
    # the tabulated value at largest R estimates the dissociation limit
    asymptote = float(bound.v_grid[-1])
    substeps = (_W1, _W0, _W1) if config.integrator == "yoshida4" else (1.0,)

    def mark_dissociated(step: int) -> None:
        out = alive & (r > radius)
        if np.any(out):
            diss_step[out] = step
            alive[out] = False

    def record(k: int) -> None:
        live = diss_step < 0
        pos[k, live] = r[live]
        vel[k, live] = v[live]

    mark_dissociated(0)
    record(0)

    a = np.zeros(n_el)
    if np.any(alive):
        a[alive] = ff.acceleration(r[alive], 0.0)

    t_fs = 0.0
    krec = 1
    for step in range(1, n_steps + 1):
        for gamma in substeps:
            dtau = gamma * dt_au
            if np.any(alive):
                m = alive
                r[m] += v[m] * dtau + 0.5 * a[m] * dtau * dtau
                mark_dissociated(step)
            t_fs += gamma * config.dt
            if np.any(alive):
                m = alive
                a_new = ff.acceleration(r[m], t_fs)
                v[m] += 0.5 * (a[m] + a_new) * dtau
                a[m] = a_new

        if not energy_checked and t_fs >= pulses_end:
            if np.any(alive):
                e_ff = 0.5 * config.mass * v[alive] ** 2 + bound.interpolant(r[alive])
                unbound = np.flatnonzero(alive)[e_ff > asymptote]
                if len(unbound):
                    diss_step[unbound] = step
                    alive[unbound] = False
            energy_checked = True
        mark_dissociated(step)

        if krec < n_rec and step == rec_idx[krec]:
            record(krec)
            krec += 1

    times = rec_idx * config.dt
    out = []
    for i, e in enumerate(elements):
        d_at = None
        if diss_step[i] >= 0:
            d_at = int(np.searchsorted(rec_idx, diss_step[i]))
        out.append(Trajectory(v_label=e.v_label, weight=e.weight, times=times,
                              positions=pos[:, i], velocities=vel[:, i],
                              dissociated_at=d_at))
    return out


def energy_of(element: EnsembleElement, surface: pes.PotentialSurface,
              mass: float = units.D2_REDUCED_MASS) -> float:
    """Total classical energy mu v^2 / 2 + V(r) on the given surface (au)."""
    if element.status != BOUND:
        raise ValidationError("energy_of requires a bound element")
    return 0.5 * mass * element.velocity ** 2 + pes.evaluate(surface, element.r)


def build_elements(initials, weights=None) -> list[EnsembleElement]:
    """Ensemble from initial conditions, optionally re-weighted.

    ``weights`` may be an InitialPopulation-style array indexed by v; the
    default keeps the weights already carried by the initial conditions.
    """
    out = []
    for ic in initials:
        w = ic.weight if weights is None else float(weights[ic.v])
        out.append(EnsembleElement(v_label=ic.v, r=ic.r0, velocity=0.0, weight=w))
    return out
