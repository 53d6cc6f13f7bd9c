#!/usr/bin/env python3
"""Generate the bundled potential-energy tables.

D2+ curves (1s sigma_g bound state, 2p sigma_u repulsive state) come from
the exact clamped-nuclei two-center Coulomb problem: the one-electron
Schrodinger equation with two unit charges separates in prolate spheroidal
coordinates (xi, eta).  For each internuclear distance R the angular
equation is diagonalised in a Legendre basis and the radial (xi) equation
is solved by two-sided shooting with Wronskian matching; the electronic
energy is the root of the match defect.  Accuracy is limited only by the
ODE tolerances (~1e-9 au), far below the 1e-4 au needed here.

The D2 neutral ground state is a Morse curve built from the standard
spectroscopic constants of molecular hydrogen (De = 38293 cm^-1,
Re = 1.4011 au, we = 4401.21 cm^-1); the potential curve itself is
isotope-independent under the clamped-nuclei approximation.

Tables are written on the uniform grid R in [0.4, 20] au, step 0.02 au,
with energies measured from each curve's own dissociation asymptote.

Usage:  python3 tools/make_potential_tables.py [outdir]
"""

import sys
import time
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

R_MIN, R_MAX, R_STEP = 0.4, 20.0, 0.02

# H2 X state Morse constants (hartree / bohr), from De = 38293 cm^-1,
# Re = 1.4011 bohr, we = 4401.21 cm^-1 with mu(H2) = 918.076 m_e.
MORSE_DE = 38293.0 / 219474.6313632
MORSE_RE = 1.4011
MORSE_A = (4401.21 / 219474.6313632) * np.sqrt(918.076 / (2.0 * MORSE_DE))


def angular_eigenvalue(p2: float, parity: int, nbasis: int = 90) -> float:
    """Separation constant A of the eta equation.

    d/deta[(1-eta^2) Y'] + (A + p2*eta^2) Y = 0, expanded in normalized
    Legendre polynomials of the requested parity (0 = even, sigma_g;
    1 = odd, sigma_u).  Returns the A that connects to l = parity at
    p2 = 0, i.e. the lowest state of the sector.
    """
    ls = np.arange(parity, parity + 2 * nbasis, 2, dtype=float)
    diag = -ls * (ls + 1.0) + p2 * (
        (ls + 1.0) ** 2 / ((2 * ls + 1.0) * (2 * ls + 3.0))
        + ls**2 / ((2 * ls + 1.0) * (2 * ls - 1.0))
    )
    lo = ls[:-1]
    off = p2 * (lo + 1.0) * (lo + 2.0) / (
        (2 * lo + 3.0) * np.sqrt((2 * lo + 1.0) * (2 * lo + 5.0))
    )
    # A = -lambda_max of (L + p2 * H); the tridiagonal form is exact
    # because eta^2 couples only l and l+/-2 within one parity sector.
    lam = eigh_tridiagonal(diag, off, select="i", select_range=(nbasis - 1, nbasis - 1))[0][0]
    return -lam


def _xi_rhs(xi, y, p2, twoR, A):
    x, dx = y
    return (dx, ((p2 * xi * xi - twoR * xi + A) * x - 2.0 * xi * dx) / (xi * xi - 1.0))


def match_defect(E: float, R: float, parity: int) -> float:
    """Normalized Wronskian of outward/inward xi solutions at the match point.

    Zero exactly at the electronic eigenvalues of the given parity sector.
    """
    p2 = -R * R * E / 2.0
    p = np.sqrt(p2)
    A = angular_eigenvalue(p2, parity)
    twoR = 2.0 * R

    xi_match = 1.0 + min(max(4.0 / p, 1.0), 12.0)
    xi_max = xi_match + 30.0 / p

    # Outward from the regular singular point xi = 1:
    # 2 X'(1) = (p^2 - 2R + A) X(1).
    d0 = 0.5 * (p2 - twoR + A)
    eps = 1e-8
    out = solve_ivp(
        _xi_rhs, (1.0 + eps, xi_match), (1.0 + d0 * eps, d0),
        args=(p2, twoR, A), method="DOP853", rtol=1e-11, atol=1e-14,
    )
    xo, dxo = out.y[0][-1], out.y[1][-1]

    # Inward from the asymptotic form X ~ xi^sigma e^{-p xi}.
    sigma = twoR / (2.0 * p) - 1.0
    inw = solve_ivp(
        _xi_rhs, (xi_max, xi_match), (1.0, -p + sigma / xi_max),
        args=(p2, twoR, A), method="DOP853", rtol=1e-11, atol=1e-300,
    )
    xi_, dxi_ = inw.y[0][-1], inw.y[1][-1]

    no = np.hypot(xo, dxo)
    ni = np.hypot(xi_, dxi_)
    return (dxo * xi_ - xo * dxi_) / (no * ni)


def electronic_energy(R: float, parity: int, guess: float | None = None) -> float:
    """Lowest electronic eigenvalue (au) of the sector at separation R."""
    lo_lim, hi_lim = (-2.2, -0.5000001) if parity == 0 else (-0.85, -0.5000001)
    if guess is not None:
        # Continuation from a neighbouring R: expand a small bracket.
        for half in (0.004, 0.02, 0.08):
            a, b = max(guess - half, lo_lim), min(guess + half, hi_lim)
            fa, fb = match_defect(a, R, parity), match_defect(b, R, parity)
            if np.sign(fa) != np.sign(fb):
                return brentq(match_defect, a, b, args=(R, parity), xtol=1e-12, rtol=8.9e-16)
    # Dense scan for the first sign change above the lower limit.
    es = np.linspace(lo_lim, hi_lim, 400)
    fprev = match_defect(es[0], R, parity)
    for e_lo, e_hi in zip(es[:-1], es[1:]):
        fnext = match_defect(e_hi, R, parity)
        if np.sign(fprev) != np.sign(fnext):
            return brentq(match_defect, e_lo, e_hi, args=(R, parity), xtol=1e-12, rtol=8.9e-16)
        fprev = fnext
    raise RuntimeError(f"no eigenvalue bracketed at R={R} parity={parity}")


def two_center_curve(r_grid: np.ndarray, parity: int) -> np.ndarray:
    """Binding energy V(R) = E_el + 1/R + 0.5 along the grid (asymptote = 0)."""
    i0 = int(np.argmin(np.abs(r_grid - 2.0)))
    e = np.empty_like(r_grid)
    e[i0] = electronic_energy(r_grid[i0], parity)
    for i in range(i0 + 1, len(r_grid)):
        e[i] = electronic_energy(r_grid[i], parity, guess=e[i - 1])
    for i in range(i0 - 1, -1, -1):
        e[i] = electronic_energy(r_grid[i], parity, guess=e[i + 1])
    return e + 1.0 / r_grid + 0.5


def morse_neutral(r_grid: np.ndarray) -> np.ndarray:
    x = np.exp(-MORSE_A * (r_grid - MORSE_RE))
    return MORSE_DE * (1.0 - x) ** 2 - MORSE_DE


def write_table(path: Path, r: np.ndarray, v: np.ndarray, title: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {title}\n")
        fh.write("# columns: R_au  V_au (energy measured from the dissociation asymptote)\n")
        fh.write(f"# generated by tools/{Path(__file__).name}\n")
        for ri, vi in zip(r, v):
            fh.write(f"{ri:.2f}  {vi: .12e}\n")
    print(f"wrote {path}  ({len(r)} rows)")


def main() -> None:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("src/qcvib/data")
    outdir.mkdir(parents=True, exist_ok=True)
    n = int(round((R_MAX - R_MIN) / R_STEP)) + 1
    r = np.round(R_MIN + R_STEP * np.arange(n), 10)

    # Spot checks against the classical two-center benchmarks at R = 2.
    eg2 = electronic_energy(2.0, 0)
    eu2 = electronic_energy(2.0, 1)
    print(f"E_el(sigma_g, R=2) = {eg2:.8f}  (benchmark -1.10263421)")
    print(f"E_el(sigma_u, R=2) = {eu2:.8f}  (benchmark -0.66753439)")
    assert abs(eg2 + 1.10263421) < 5e-6, "sigma_g benchmark failed"
    assert abs(eu2 + 0.66753439) < 5e-6, "sigma_u benchmark failed"

    t0 = time.time()
    vg = two_center_curve(r, 0)
    print(f"sigma_g curve done in {time.time() - t0:.1f} s")
    t0 = time.time()
    vu = two_center_curve(r, 1)
    print(f"sigma_u curve done in {time.time() - t0:.1f} s")
    vn = morse_neutral(r)

    imin = int(np.argmin(vg))
    print(f"sigma_g minimum: R = {r[imin]:.2f} au, V = {vg[imin]:.6f} au")

    write_table(outdir / "d2plus_1ssg.dat", r, vg,
                "D2+ 1s sigma_g Born-Oppenheimer potential (exact two-center eigenvalues)")
    write_table(outdir / "d2plus_2psu.dat", r, vu,
                "D2+ 2p sigma_u Born-Oppenheimer potential (exact two-center eigenvalues)")
    write_table(outdir / "d2_neutral.dat", r, vn,
                "D2 ground-state potential (Morse fit to H2 spectroscopic constants)")


if __name__ == "__main__":
    main()
