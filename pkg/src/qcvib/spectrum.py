"""Bound vibrational states of a potential curve and quantized initial
conditions for the classical ensemble.

The eigensolver is Numerov shooting on a fine uniform grid: node-count
bisection isolates each level, then the two-sided matching defect is
driven to zero.  Initial ensemble positions are the inner-branch points of
the curve at the mid-point energies between adjacent levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pes, units
from .errors import GeometryError, SolverError, UnboundStateError, ValidationError

SOLVER_GRID_STEP = 0.005   # au; finer than the working grid
EIGEN_TOL = 1e-9           # au, brentq tolerance on eigenvalues
FORBIDDEN_ACTION = 45.0    # integral of kappa dx kept beyond the turning points

try:
    from numba import njit as _njit

    def _jit(fn):
        return _njit(cache=True)(fn)
except ImportError:  # pragma: no cover - numba is optional
    def _jit(fn):
        return fn


def _sweep_endpoint(f, h2_12, i_from, i_to, step):
    """Numerov sweep of chi'' = f chi from i_from to i_to (inclusive).

    Starts from (0, tiny) deep in the forbidden region.  Returns the last
    two values (in sweep order) and the node count, rescaling to avoid
    overflow.
    """
    x_prev = 0.0
    x_cur = 1e-12
    nodes = 0
    j = i_from + step
    while j != i_to:
        cm = 1.0 - h2_12 * f[j - step]
        c0 = 2.0 + 10.0 * h2_12 * f[j]
        cp = 1.0 - h2_12 * f[j + step]
        x_next = (c0 * x_cur - cm * x_prev) / cp
        if x_next * x_cur < 0.0:
            nodes += 1
        x_prev = x_cur
        x_cur = x_next
        if abs(x_cur) > 1e200:
            x_prev *= 1e-200
            x_cur *= 1e-200
        j += step
    return x_prev, x_cur, nodes


def _sweep_fill(f, h2_12, i_from, i_to, step, out):
    """Numerov sweep that stores the solution into ``out``."""
    out[i_from] = 0.0
    out[i_from + step] = 1e-12
    j = i_from + step
    while j != i_to:
        cm = 1.0 - h2_12 * f[j - step]
        c0 = 2.0 + 10.0 * h2_12 * f[j]
        cp = 1.0 - h2_12 * f[j + step]
        out[j + step] = (c0 * out[j] - cm * out[j - step]) / cp
        j += step
        if abs(out[j]) > 1e200:
            if step > 0:
                for k in range(i_from, j + 1):
                    out[k] *= 1e-200
            else:
                for k in range(j, i_from + 1):
                    out[k] *= 1e-200


_sweep_endpoint = _jit(_sweep_endpoint)
_sweep_fill = _jit(_sweep_fill)


@dataclass(frozen=True, eq=False)
class VibSpectrum:
    """Bound eigenenergies and eigenfunctions of a surface.

    Wavefunctions are sampled on ``grid`` (uniform, step ``grid_step``) and
    normalized to unit probability.
    """

    surface: pes.PotentialSurface
    mass: float
    energies: np.ndarray
    wavefunctions: np.ndarray
    grid: np.ndarray

    @property
    def grid_step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def v_max(self) -> int:
        return len(self.energies) - 1


@dataclass(frozen=True)
class InitialCondition:
    """Starting point of one ensemble element: at rest on the inner branch."""

    v: int
    r0: float
    weight: float = 0.0


class _Shooter:
    """Numerov machinery bound to one (surface, mass, grid) triple."""

    def __init__(self, surface: pes.PotentialSurface, mass: float, grid_step: float):
        n = int(np.floor((surface.r_max - surface.r_min) / grid_step + 1e-9))
        self.grid = surface.r_min + grid_step * np.arange(n + 1)
        self.h = grid_step
        self.v = surface.interpolant(self.grid)
        self.mass = mass

    def _windows(self, e: float) -> tuple[int, int, int]:
        """Sweep bounds (ia, ib) and matching index m for energy e."""
        allowed = np.flatnonzero(self.v < e)
        if len(allowed) == 0:
            raise SolverError(f"no classically allowed region at E = {e}")
        it_in, it_out = int(allowed[0]), int(allowed[-1])
        kappa = np.sqrt(2.0 * self.mass * np.maximum(self.v - e, 0.0))
        # keep enough forbidden region for the boundary error to be negligible
        act_in = np.cumsum(kappa[it_in::-1]) * self.h
        ia = it_in - int(np.searchsorted(act_in, FORBIDDEN_ACTION).clip(2, it_in))
        act_out = np.cumsum(kappa[it_out:]) * self.h
        ib = it_out + int(np.searchsorted(act_out, FORBIDDEN_ACTION)
                          .clip(2, len(self.v) - 1 - it_out))
        return max(ia, 0), min(ib, len(self.v) - 1), it_out

    def node_count(self, e: float) -> int:
        ia, ib, m = self._windows(e)
        f = 2.0 * self.mass * (self.v - e)
        _, _, nodes = _sweep_endpoint(f, self.h * self.h / 12.0, ia, min(m + 1, ib), 1)
        return nodes

    def defect(self, e: float, ia: int, ib: int, m: int) -> float:
        """Normalized matching Wronskian; zero at eigenvalues."""
        f = 2.0 * self.mass * (self.v - e)
        h2_12 = self.h * self.h / 12.0
        xo_m, xo_m1, _ = _sweep_endpoint(f, h2_12, ia, m + 1, 1)
        xi_m1, xi_m, _ = _sweep_endpoint(f, h2_12, ib, m, -1)
        w = xo_m * xi_m1 - xo_m1 * xi_m
        return w / ((abs(xo_m) + abs(xo_m1)) * (abs(xi_m) + abs(xi_m1)))

    def eigenfunction(self, e: float) -> np.ndarray:
        ia, ib, m = self._windows(e)
        f = 2.0 * self.mass * (self.v - e)
        h2_12 = self.h * self.h / 12.0
        chi = np.zeros_like(self.v)
        _sweep_fill(f, h2_12, ia, m, 1, chi)
        tail = np.zeros_like(self.v)
        _sweep_fill(f, h2_12, ib, m, -1, tail)
        if tail[m] != 0.0:
            chi[m + 1:ib + 1] = tail[m + 1:ib + 1] * (chi[m] / tail[m])
        norm = np.sqrt(np.trapezoid(chi * chi, dx=self.h))
        chi /= norm
        if chi[np.flatnonzero(np.abs(chi) > 1e-8)[0]] < 0.0:
            chi = -chi
        return chi


def _count_nodes(chi: np.ndarray) -> int:
    sig = chi[np.abs(chi) > 1e-8 * np.max(np.abs(chi))]
    return int(np.sum(sig[:-1] * sig[1:] < 0.0))


def bound_states(surface: pes.PotentialSurface, mass: float,
                 v_max_hint: int = 40,
                 grid_step: float = SOLVER_GRID_STEP) -> VibSpectrum:
    """All bound levels of the surface up to ``v_max_hint``.

    Node-count bisection brackets each level; the two-sided Numerov
    matching defect is then driven to zero with Brent's method.
    """
    if mass <= 0.0:
        raise ValidationError("mass must be > 0")
    sh = _Shooter(surface, mass, grid_step)
    r_eq, v_min = pes.surface_minimum(surface)
    if not (surface.r_min < r_eq < surface.r_max):
        raise ValidationError("surface needs an interior minimum")
    floor = v_min + 1e-12
    ceil = min(float(sh.v[0]), float(sh.v[-1])) - 1e-12
    if ceil <= floor:
        raise SolverError("surface has no well below its edges")
    n_total = sh.node_count(ceil)
    if n_total == 0:
        raise SolverError("no bound state found")
    n_states = min(n_total, v_max_hint + 1)

    # Bisect the node count to the energy where it jumps from v to v+1.
    jumps = np.empty(n_states)
    for v in range(n_states):
        lo, hi = floor, ceil
        while hi - lo > 1e-7:
            mid = 0.5 * (lo + hi)
            if sh.node_count(mid) <= v:
                lo = mid
            else:
                hi = mid
        jumps[v] = hi

    from scipy.optimize import brentq

    energies = np.empty(n_states)
    waves = []
    for v in range(n_states):
        gap = jumps[v] - (jumps[v - 1] if v > 0 else floor)
        lo = jumps[v] - 0.95 * gap
        hi = min(jumps[v] + 0.05 * gap, ceil)
        ia, ib, m = sh._windows(jumps[v])
        es = np.linspace(lo, hi, 48)
        ds = [sh.defect(e, ia, ib, m) for e in es]
        root = None
        for k in range(len(es) - 1, 0, -1):
            if np.sign(ds[k - 1]) != np.sign(ds[k]):
                root = brentq(sh.defect, es[k - 1], es[k], args=(ia, ib, m),
                              xtol=EIGEN_TOL, rtol=8.9e-16)
                break
        if root is None:
            raise SolverError(
                f"matching defect has no sign change near v={v} "
                f"(bracket [{lo:.6e}, {hi:.6e}])")
        energies[v] = root
        chi = sh.eigenfunction(root)
        if _count_nodes(chi) != v:
            raise SolverError(
                f"eigenfunction for v={v} has {_count_nodes(chi)} nodes")
        waves.append(chi)

    if np.any(np.diff(energies) <= 0.0):
        raise SolverError("eigenvalues not strictly increasing")
    return VibSpectrum(surface=surface, mass=mass, energies=energies,
                       wavefunctions=np.array(waves), grid=sh.grid)


def inner_branch_root(surface: pes.PotentialSurface, energy: float,
                      xtol: float = 1e-9) -> float:
    """Inner-branch separation where V(R) = energy, by bisection."""
    r_eq, v_min = pes.surface_minimum(surface)
    lo, hi = surface.r_min, r_eq
    f_lo = pes.evaluate(surface, lo) - energy
    f_hi = v_min - energy
    if f_lo < 0.0 or f_hi > 0.0:
        raise GeometryError(
            f"energy {energy} not bracketed on the inner branch of '{surface.label}'")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if pes.evaluate(surface, mid) - energy > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def midpoint_energies(spectrum: VibSpectrum, top_cap: float = 0.0) -> np.ndarray:
    """Mid-point energies (E_v + E_{v+1})/2; the top level extrapolates its
    last gap, capped at the dissociation asymptote (``top_cap``)."""
    e = spectrum.energies
    if len(e) < 2:
        raise ValidationError("need at least two bound states")
    mids = 0.5 * (e[:-1] + e[1:])
    top = min(top_cap, e[-1] + 0.5 * (e[-1] - e[-2]))
    return np.append(mids, top)


def initial_positions(spectrum: VibSpectrum, surface: pes.PotentialSurface,
                      top_cap: float = 0.0) -> list[InitialCondition]:
    """One inner-branch starting point per bound level (weights left zero)."""
    mids = midpoint_energies(spectrum, top_cap=top_cap)
    return [InitialCondition(v=v, r0=inner_branch_root(surface, m))
            for v, m in enumerate(mids)]


def period_of(spectrum: VibSpectrum, v: int, cycles: int = 5,
              dt_fs: float = 0.02) -> float:
    """Classical period (fs) of the element launched at r0(v), at rest.

    Timed between successive inner-turning-point passages and averaged
    over ``cycles`` cycles of field-free motion.
    """
    from . import ensemble  # deferred: ensemble imports this module's types

    if not 0 <= v <= spectrum.v_max:
        raise ValidationError(f"v={v} outside the computed ladder")
    mids = midpoint_energies(spectrum)
    r0 = inner_branch_root(spectrum.surface, mids[v])
    # semiclassical estimate sets the integration span
    gaps = np.diff(spectrum.energies)
    gap = gaps[min(v, len(gaps) - 1)]
    t_est_fs = units.au_to_fs(2.0 * np.pi / gap)
    config = ensemble.PropagationConfig(dt=dt_fs, t_end=(cycles + 1.5) * t_est_fs,
                                        record_stride=1)
    elem = ensemble.EnsembleElement(v_label=v, r=r0, velocity=0.0, weight=1.0)
    traj = ensemble.propagate([elem], spectrum.surface, None, [], config)[0]
    if traj.statuses[-1] != ensemble.BOUND:
        raise UnboundStateError(f"trajectory for v={v} dissociated")
    vel = traj.velocities
    t = traj.times
    crossings = []
    for i in np.flatnonzero((vel[:-1] < 0.0) & (vel[1:] >= 0.0)):
        frac = vel[i] / (vel[i] - vel[i + 1])
        crossings.append(t[i] + frac * (t[i + 1] - t[i]))
    if len(crossings) < cycles + 1:
        raise SolverError(f"too few turning-point passages for v={v}")
    diffs = np.diff(crossings[:cycles + 1])
    return float(np.mean(diffs))
