"""Open-boundary scattering through a cone-like junction between cylinders.

On the axisymmetric junction the azimuthal channels decouple exactly, so a
carrier injected in transverse mode n scatters according to a single radial
ODE on z in [-a, a],

    -(hbar^2/2m) [ (1/w)(p phi')' - n^2 phi / rho^2 ] + U(z) phi = E phi,

with p = rho/sqrt(1+rho'^2), w = rho sqrt(1+rho'^2) and U the
curvature-induced potential of the profile.  Outside [-a, a] the radius and
U are exactly constant, so the leads carry plane waves; the incident,
reflected and transmitted waves are imposed as boundary rows of a banded
linear system (transmitting-boundary closure).

The discretization is second-order central differences on a uniform grid
with p at half points.  The boundary rows use the Bloch wavenumber q of the
*discrete* lead stencil (cos qh = 1 - k^2 h^2/2), which makes the discrete
probability current exactly conserved: with

    T = (p_out sin(q_out h) / (p_in sin(q_in h))) |t|^2,   R = |r|^2,

R + T = 1 holds to solver roundoff on any grid, and T converges at second
order to the continuum current ratio (k_out R_out / k_in R_in) |t|^2.
The potential is jump-discontinuous at the four profile branch points; it
is cell-averaged there to keep the scheme second order.

Every solve is independent; sweeps are embarrassingly parallel.
"""

from dataclasses import dataclass, replace
import cmath
import math

import numpy as np
from scipy.linalg import solve_banded

from . import constants
from .geometry import JunctionGeometry, curvature_invariant

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(10)


class ClosedChannelError(ValueError):
    """The requested incoming channel does not propagate at this energy."""


class SingularSystemError(RuntimeError):
    """The scattering linear system could not be solved."""


@dataclass(frozen=True)
class ScatterConfig:
    """One scattering run: injection energy and numerical knobs.

    ``energy`` is the longitudinal injection energy E_l in meV (kinetic
    energy of the incident plane wave in its lead).  ``mode`` is the
    azimuthal quantum number of the injected transverse state.
    ``grid_points`` counts grid intervals on [-a, a].  ``include_gp``
    switches the curvature-induced potential (the geometry's kinetic
    metric factors stay on either way).
    """

    energy: float
    mass_ratio: float = constants.JUNCTION_MASS_RATIO
    mode: int = 0
    grid_points: int = 4000
    include_gp: bool = True

    def __post_init__(self):
        if self.energy <= 0:
            raise ValueError("injection energy must be positive")
        if self.mass_ratio <= 0:
            raise ValueError("mass_ratio must be positive")
        if self.grid_points < 500:
            raise ValueError("grid_points must be >= 500")


@dataclass(frozen=True)
class LeadWavenumbers:
    """Continuum wavenumbers of the two leads at total energy E."""

    k_in: float
    k_out: float            # decay constant kappa when evanescent
    out_evanescent: bool


@dataclass(frozen=True)
class ScatteringSolution:
    r: complex               # reflection amplitude
    t: complex               # transmission amplitude
    T: float                 # transmitted current fraction
    R_coeff: float           # reflected current fraction |r|^2
    k1: float                # injection-lead wavenumber, 1/nm
    k2: float                # outgoing-lead wavenumber (kappa if evanescent)
    k2_evanescent: bool
    z_grid: np.ndarray
    phi: np.ndarray          # scattering wave on z_grid (incident amp. 1)
    E_total: float           # total energy, meV


def lead_potential(radius: float, mode: int, mass_ratio: float) -> float:
    """Transverse + curvature offset of a cylindrical lead, meV."""
    kin = constants.kinetic_factor(mass_ratio)
    return kin * (mode**2 - 0.25) / radius**2


def total_energy(config: ScatterConfig, junction: JunctionGeometry) -> float:
    """Total energy of a carrier injected from the wide (r_in) lead, meV.

    E = E_l + hbar^2 n^2/(2 m r_in^2) + U_in, where U_in = -hbar^2/(8 m r_in^2)
    is the curvature-induced offset of the injection cylinder.
    """
    return config.energy + lead_potential(junction.r_in, config.mode,
                                          config.mass_ratio)


def lead_wavenumbers(junction: JunctionGeometry, E: float, mode: int,
                     mass_ratio: float) -> LeadWavenumbers:
    """Wavenumbers of both leads at total energy E; rejects a closed inlet."""
    kin = constants.kinetic_factor(mass_ratio)
    e_in = E - lead_potential(junction.r_in, mode, mass_ratio)
    e_out = E - lead_potential(junction.r_out, mode, mass_ratio)
    if e_in <= 0:
        raise ClosedChannelError(
            f"incoming channel n={mode} is closed at E={E} meV")
    k_in = math.sqrt(e_in / kin)
    if e_out > 0:
        return LeadWavenumbers(k_in, math.sqrt(e_out / kin), False)
    return LeadWavenumbers(k_in, math.sqrt(-e_out / kin), True)


def _cell_averaged_invariant(junction, z, h):
    """Curvature invariant at the nodes, cell-averaged around the GP jumps."""
    inv = curvature_invariant(junction, z)
    a = junction.half_length
    n_nodes = len(z)
    fix = set()
    for bp in junction.branch_points:
        i = (bp + a) / h
        for idx in (math.floor(i), math.ceil(i)):
            if 0 <= idx < n_nodes and abs(bp - z[idx]) <= h / 2 + 1e-12 * a:
                fix.add(idx)
    for idx in fix:
        lo, hi = z[idx] - h / 2, z[idx] + h / 2
        cuts = [lo] + [b for b in junction.branch_points if lo < b < hi] + [hi]
        acc = 0.0
        for x0, x1 in zip(cuts[:-1], cuts[1:]):
            zz = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * _GAUSS_X
            acc += 0.5 * (x1 - x0) * np.sum(
                _GAUSS_W * curvature_invariant(junction, zz))
        inv[idx] = acc / h
    return inv


def _bloch_factor(e_kin, kin, h):
    """exp(i q h) for the lead stencil; real decaying factor if closed."""
    c = 1.0 - e_kin * h * h / (2.0 * kin)
    if e_kin > 0:
        if c <= -1.0:
            raise ValueError("grid too coarse to represent the lead wave")
        q = math.acos(c) / h
        return cmath.exp(1j * q * h), q
    # evanescent: mu + 1/mu = 2c with mu in (0, 1)
    mu = c - math.sqrt(c * c - 1.0)
    return mu, math.log(1.0 / mu) / h   # second value = decay constant


def solve_scattering(junction: JunctionGeometry, config: ScatterConfig,
                     inject_from_out: bool = False) -> ScatteringSolution:
    """Scattering state and transmission for one injection energy.

    The incident wave has unit amplitude and enters from the r_in lead
    (or the r_out lead with ``inject_from_out``).  Returns amplitudes,
    current fractions, and the wave on the grid.
    """
    kin = constants.kinetic_factor(config.mass_ratio)
    a = junction.half_length
    n = config.mode
    N = config.grid_points
    z = np.linspace(-a, a, N + 1)
    h = z[1] - z[0]

    rho, rho_p, _ = junction.profile(z)
    w = rho * np.sqrt(1.0 + rho_p**2)
    zh = z[:-1] + h / 2
    rho_h, rho_ph, _ = junction.profile(zh)
    # p at half points; the outermost values sit in the uniform leads
    p = np.empty(N + 2)
    p[0] = junction.r_in
    p[-1] = junction.r_out
    p[1:-1] = rho_h / np.sqrt(1.0 + rho_ph**2)

    V = kin * n**2 / rho**2
    if config.include_gp:
        V = V - kin * _cell_averaged_invariant(junction, z, h)

    v_in = lead_potential(junction.r_in, n, config.mass_ratio)
    v_out = lead_potential(junction.r_out, n, config.mass_ratio)
    if not config.include_gp:
        v_in += kin * 0.25 / junction.r_in**2
        v_out += kin * 0.25 / junction.r_out**2
    E = config.energy + (v_out if inject_from_out else v_in)

    e_in, e_out = E - v_in, E - v_out
    if (e_out if inject_from_out else e_in) <= 0:
        raise ClosedChannelError("incident channel is closed")
    f_in, q_in = _bloch_factor(e_in, kin, h)
    f_out, q_out = _bloch_factor(e_out, kin, h)
    in_evan = e_in <= 0
    out_evan = e_out <= 0

    coef = kin / (w * h * h)
    diag = (coef * (p[1:] + p[:-1]) + V - E).astype(complex)
    diag[0] -= coef[0] * p[0] * f_in
    diag[-1] -= coef[-1] * p[-1] * f_out
    rhs = np.zeros(N + 1, dtype=complex)
    if not inject_from_out:
        rhs[0] = coef[0] * p[0] * (-2j * math.sin(q_in * h)
                                   * cmath.exp(-1j * q_in * a))
    else:
        rhs[-1] = coef[-1] * p[-1] * (-2j * math.sin(q_out * h)
                                      * cmath.exp(-1j * q_out * a))

    band = np.zeros((3, N + 1), dtype=complex)
    band[0, 1:] = -coef[:-1] * p[1:-1]    # superdiagonal
    band[1] = diag
    band[2, :-1] = -coef[1:] * p[1:-1]    # subdiagonal
    try:
        phi = solve_banded((1, 1), band, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(_singular_report(band, exc)) from exc
    if not np.all(np.isfinite(phi)):
        raise SingularSystemError(_singular_report(band, "non-finite wave"))

    if inject_from_out:
        r = (phi[-1] - cmath.exp(-1j * q_out * a)) * cmath.exp(-1j * q_out * a)
        if in_evan:
            t, T = phi[0], 0.0
        else:
            t = phi[0] * cmath.exp(-1j * q_in * a)
            T = (junction.r_in * math.sin(q_in * h)
                 / (junction.r_out * math.sin(q_out * h))) * abs(t)**2
    else:
        r = (phi[0] - cmath.exp(-1j * q_in * a)) * cmath.exp(-1j * q_in * a)
        if out_evan:
            t, T = phi[-1], 0.0
        else:
            t = phi[-1] * cmath.exp(-1j * q_out * a)
            T = (junction.r_out * math.sin(q_out * h)
                 / (junction.r_in * math.sin(q_in * h))) * abs(t)**2

    k1 = math.sqrt(abs(e_in) / kin)
    k2 = math.sqrt(abs(e_out) / kin)
    return ScatteringSolution(r=complex(r), t=complex(t), T=float(T),
                              R_coeff=abs(r)**2, k1=k1, k2=k2,
                              k2_evanescent=bool(out_evan), z_grid=z,
                              phi=phi, E_total=float(E))


def _singular_report(band, detail):
    # cheap order-of-magnitude conditioning indicator from the band itself
    mags = np.abs(band[1])
    mags = mags[mags > 0]
    est = mags.max() / mags.min() if mags.size else math.inf
    return (f"scattering system singular ({detail}); "
            f"diagonal dynamic range ~{est:.1e}")


@dataclass(frozen=True)
class SweepResult:
    """Vectorized transmission sweep; failed points carry NaN."""

    x: np.ndarray            # swept parameter (E_l in meV, or r_in in nm)
    T: np.ndarray
    R_coeff: np.ndarray
    failures: tuple          # (index, message) pairs

    def __iter__(self):
        return iter((self.x, self.T))


def transmission_vs_energy(junction: JunctionGeometry, energies,
                           config: ScatterConfig) -> SweepResult:
    """T(E_l) over a monotone grid of injection energies."""
    energies = np.asarray(energies, dtype=float)
    T = np.full(energies.shape, np.nan)
    R = np.full(energies.shape, np.nan)
    failures = []
    for i, e in enumerate(energies):
        try:
            sol = solve_scattering(junction, replace(config, energy=float(e)))
        except (ValueError, RuntimeError) as exc:
            failures.append((i, f"E_l={e}: {exc}"))
            continue
        T[i], R[i] = sol.T, sol.R_coeff
    return SweepResult(energies, T, R, tuple(failures))


def transmission_vs_inlet_radius(r_in_values, half_length: float,
                                 r_out: float, smooth_len: float,
                                 config: ScatterConfig) -> SweepResult:
    """T(r_in) at fixed injection energy and fixed r_out, a, eps."""
    r_in_values = np.asarray(r_in_values, dtype=float)
    T = np.full(r_in_values.shape, np.nan)
    R = np.full(r_in_values.shape, np.nan)
    failures = []
    for i, r1 in enumerate(r_in_values):
        try:
            junction = JunctionGeometry(float(r1), r_out, half_length,
                                        smooth_len)
            sol = solve_scattering(junction, config)
        except (ValueError, RuntimeError) as exc:
            failures.append((i, f"r_in={r1}: {exc}"))
            continue
        T[i], R[i] = sol.T, sol.R_coeff
    return SweepResult(r_in_values, T, R, tuple(failures))
