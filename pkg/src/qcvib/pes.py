"""Potential energy surfaces: ingestion, interpolation, differentiation,
and laser dressing.

A surface is a tabulated one-dimensional curve V(R) with a natural cubic
spline interpolant.  Derivatives follow the two-step construction used
throughout the package: a five-point central-difference stencil on a
uniform working grid, then a natural spline through the stencil values.
The same construction is applied to the laser-dressed potential during
propagation, so forces are consistent between the static and driven cases.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .errors import OutOfRangeError, ParseError, ValidationError

# Uniform working-grid spacing (au) for stencil differentiation.  Input
# tables are resampled to this spacing before differencing.
WORKING_GRID_STEP = 0.02

# Default channel offset (au) entering Ip(R): the binding energy of the
# atomic fragment left behind, aligning the ionic and neutral dissociation
# asymptotes (D2 -> D + D at -1.0 au total, D2+ -> D + D+ at -0.5 au).
DEFAULT_CHANNEL_OFFSET = 0.5


@dataclass(frozen=True, eq=False)
class PotentialSurface:
    """Tabulated Born-Oppenheimer curve with spline access.

    Immutable after construction; safe for concurrent reads.  Identity
    semantics (eq=False) so surfaces can key caches.
    """

    label: str
    r_grid: np.ndarray
    v_grid: np.ndarray
    interpolant: CubicSpline = field(repr=False)

    @property
    def r_min(self) -> float:
        return float(self.r_grid[0])

    @property
    def r_max(self) -> float:
        return float(self.r_grid[-1])


@dataclass(frozen=True)
class DressedSurfaceSample:
    """One point of the lower adiabatic laser-dressed surface."""

    r: float
    v: float
    field_amplitude: float


def make_surface(r: np.ndarray, v: np.ndarray, label: str = "") -> PotentialSurface:
    """Build a surface from arrays, validating the shared invariants."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    if r.ndim != 1 or r.shape != v.shape:
        raise ValidationError("r and v must be 1-d arrays of equal length")
    if len(r) < 8:
        raise ValidationError(f"surface '{label}' needs >= 8 points, got {len(r)}")
    if not np.all(np.isfinite(r)) or not np.all(np.isfinite(v)):
        raise ValidationError(f"surface '{label}' contains non-finite values")
    if np.any(r <= 0.0) or np.any(r > 100.0):
        raise ValidationError(f"surface '{label}' has R outside (0, 100] au")
    if np.any(np.diff(r) <= 0.0):
        raise ValidationError(f"surface '{label}' requires strictly increasing R")
    spline = CubicSpline(r, v, bc_type="natural")
    return PotentialSurface(label=label, r_grid=r, v_grid=v, interpolant=spline)


def load_surface(path: str | Path, label: str = "") -> PotentialSurface:
    """Read a two-column (R_au, V_au) text table; '#' starts a comment."""
    path = Path(path)
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ParseError(f"expected two columns, got {len(parts)}",
                                 path=str(path), line=lineno)
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ParseError(f"non-numeric entry {parts!r}",
                                 path=str(path), line=lineno) from None
    if not rows:
        raise ParseError("no data rows", path=str(path), line=0)
    rows.sort(key=lambda rv: rv[0])
    r = np.array([rv[0] for rv in rows])
    v = np.array([rv[1] for rv in rows])
    if np.any(np.diff(r) == 0.0):
        dup = r[np.flatnonzero(np.diff(r) == 0.0)[0]]
        raise ValidationError(f"duplicate R = {dup} in {path}")
    return make_surface(r, v, label=label or path.stem)


def bundled_surface(name: str) -> PotentialSurface:
    """Load one of the shipped tables: d2_neutral, d2plus_1ssg, d2plus_2psu."""
    ref = resources.files("qcvib.data").joinpath(f"{name}.dat")
    with resources.as_file(ref) as path:
        return load_surface(path, label=name)


def evaluate(surface: PotentialSurface, r) -> float | np.ndarray:
    """Natural-cubic-spline value of V at r (no extrapolation)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < surface.r_min) or np.any(r_arr > surface.r_max):
        raise OutOfRangeError(
            f"r outside [{surface.r_min}, {surface.r_max}] au on '{surface.label}'")
    out = surface.interpolant(r_arr)
    return float(out) if np.isscalar(r) or r_arr.ndim == 0 else out


def working_grid(surface: PotentialSurface, step: float = WORKING_GRID_STEP) -> np.ndarray:
    """Uniform resampling grid spanning the surface's tabulated range."""
    n = int(np.floor((surface.r_max - surface.r_min) / step + 1e-9))
    return surface.r_min + step * np.arange(n + 1)


def stencil_derivative(values: np.ndarray, step: float) -> np.ndarray:
    """Five-point central-difference first derivative on a uniform grid.

    Returns the derivative on the interior points (two dropped per side).
    """
    return (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * step)


@functools.lru_cache(maxsize=32)
def _derivative_spline(surface: PotentialSurface) -> tuple[CubicSpline, float, float]:
    grid = working_grid(surface)
    vals = surface.interpolant(grid)
    dv = stencil_derivative(vals, WORKING_GRID_STEP)
    inner = grid[2:-2]
    return CubicSpline(inner, dv, bc_type="natural"), float(inner[0]), float(inner[-1])


def derivative(surface: PotentialSurface, r) -> float | np.ndarray:
    """dV/dR at r: stencil on the working grid, then spline interpolation."""
    spline, lo, hi = _derivative_spline(surface)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < lo) or np.any(r_arr > hi):
        raise OutOfRangeError(
            f"r must lie in [{lo}, {hi}] au (two working-grid spacings inside "
            f"the table) on '{surface.label}'")
    out = spline(r_arr)
    return float(out) if np.isscalar(r) or r_arr.ndim == 0 else out


def dressed_values(bound_v, repulsive_v, r, field_amplitude: float,
                   eq3_literal: bool = False) -> np.ndarray:
    """Lower adiabatic dressed energy from arrays of the two curves.

    Rabi coupling Omega = R * |E| / 2 with the transition dipole mu = R/2.
    The default is the lower adiabatic eigenvalue of the two-state system,
    mean(Vg, Vu) - sqrt(dV^2/4 + Omega^2), which reduces to the bound curve
    at zero field.  ``eq3_literal`` instead applies half the splitting plus
    a positive root (kept for comparison; it does not have the field-free
    limit).
    """
    bound_v = np.asarray(bound_v, dtype=float)
    repulsive_v = np.asarray(repulsive_v, dtype=float)
    r = np.asarray(r, dtype=float)
    dv = repulsive_v - bound_v
    omega = 0.5 * r * abs(field_amplitude)
    root = np.sqrt(0.25 * dv * dv + omega * omega)
    if eq3_literal:
        return 0.5 * dv + root
    return 0.5 * (bound_v + repulsive_v) - root


def dressed_potential(bound: PotentialSurface, repulsive: PotentialSurface,
                      r, field_amplitude: float,
                      eq3_literal: bool = False) -> float | np.ndarray:
    """Laser-dressed lower surface at separation r and field |E| (au)."""
    if field_amplitude < 0.0:
        raise ValidationError("field_amplitude must be >= 0")
    vg = evaluate(bound, r)
    vu = evaluate(repulsive, r)
    out = dressed_values(vg, vu, r, field_amplitude, eq3_literal=eq3_literal)
    return float(out) if np.isscalar(r) else out


def dressed_sample(bound: PotentialSurface, repulsive: PotentialSurface,
                   r: float, field_amplitude: float) -> DressedSurfaceSample:
    v = dressed_potential(bound, repulsive, r, field_amplitude)
    return DressedSurfaceSample(r=float(r), v=float(v), field_amplitude=float(field_amplitude))


def ionization_potential(neutral: PotentialSurface, ion: PotentialSurface, r,
                         channel_offset: float = DEFAULT_CHANNEL_OFFSET) -> float | np.ndarray:
    """Vertical ionization potential Ip(R) = V_ion - V_neutral + offset.

    Both curves are referenced to their own dissociation asymptotes, so the
    channel offset (default 0.5 au, the binding energy of the atom left
    behind) restores the absolute separation of the two channels.
    """
    v_ion = evaluate(ion, r)
    v_neu = evaluate(neutral, r)
    out = v_ion - v_neu + channel_offset
    return float(out) if np.isscalar(r) else out


def surface_minimum(surface: PotentialSurface) -> tuple[float, float]:
    """Location and value of the global minimum of the tabulated curve."""
    i = int(np.argmin(surface.v_grid))
    lo = surface.r_grid[max(i - 1, 0)]
    hi = surface.r_grid[min(i + 1, len(surface.r_grid) - 1)]
    if lo == hi:
        return float(surface.r_grid[i]), float(surface.v_grid[i])
    res = minimize_scalar(surface.interpolant, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x), float(res.fun)
