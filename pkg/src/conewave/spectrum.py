"""Bound states on the lateral surface of a truncated cone.

Separating exp(i eta theta) on the cone f(z) = rho + lambda z with hard
walls Z(0) = Z(z_max) = 0 leaves a single axial ODE.  In units of the small
rim radius (zeta = z/rho, u = 1 + lambda zeta) it reads

    Z'' + (lambda/u) Z'
        + [ (1/4 - eta^2(1+lambda^2)) / u^2 + s (1+lambda^2) ] Z = 0,

where s = 2 m omega rho^2 / hbar^2 is the dimensionless surface energy and
omega includes the curvature-induced potential.  Levels are reported through
c = sqrt(s) = rho sqrt(2 m omega)/hbar whenever omega > 0; long, gently
sloped cones can push the ground level below zero, in which case only the
energy-level API applies.

The primary solver shoots the ODE from zeta = 0 and finds the c (or s)
values where the far wall is hit; an independent finite-difference
discretization of the equivalent self-adjoint form (1/w)(p Z')' with
p = u/sqrt(1+lambda^2), w = u sqrt(1+lambda^2) serves as a cross-check, and
so does the closed-form quantization condition in terms of cylinder
functions of complex order.

Everything here is a pure function of its arguments; solves for different
cones or channels can run concurrently.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from . import constants
from .bessel import besselj_series, bessely_series
from .geometry import Cone, geometric_potential_at

DEFAULT_GRID_POINTS = 2001
_SCAN_RTOL = 1e-6
_REFINE_RTOL = 1e-11


class IntegrationError(RuntimeError):
    """The ODE integrator failed (step underflow or non-finite state)."""


class BracketingError(RuntimeError):
    """The eigenvalue scan hit its ceiling before finding enough roots."""


@dataclass(frozen=True)
class ConeGeometry:
    """Truncated cone wall: f(z) = radius + slope*z for z in [0, length].

    ``radius`` is the small rim radius, ``slope`` the tangent of the
    half-opening angle, ``length`` the axial extent between the hard walls.
    """

    radius: float
    slope: float
    length: float

    def __post_init__(self):
        if self.radius <= 0 or self.slope <= 0 or self.length <= 0:
            raise ValueError("radius, slope and length must all be positive")

    @property
    def aspect(self) -> float:
        """Axial length in units of the small rim radius."""
        return self.length / self.radius

    def generatrix(self) -> Cone:
        return Cone(self.radius, self.slope)


@dataclass(frozen=True)
class ChannelIndex:
    """Azimuthal channel: quantum number eta and its cylinder-function order."""

    eta: int
    order: complex


@dataclass(frozen=True)
class AxialMode:
    """One normalized axial bound state.

    Z_samples are real and normalized so that the axial marginal density
    integrates to one:  integral |Z|^2 w dz = 1 with the area-element
    weight w(z) = (radius + slope z) sqrt(1 + slope^2).  ``omega`` is the
    surface energy in meV for the stored mass ratio; ``omega_scaled`` is
    the same energy in units of hbar^2/(2 m radius^2) and ``c_value`` its
    square root (NaN if the energy is negative).
    """

    channel: ChannelIndex
    index_n: int
    c_value: float
    omega: float
    omega_scaled: float
    z_grid: np.ndarray
    Z_samples: np.ndarray
    weight: np.ndarray
    mass_ratio: float

    def density(self) -> np.ndarray:
        """Axial probability density |Z|^2 w on z_grid."""
        return self.Z_samples**2 * self.weight


def bessel_order(eta: int, slope: float) -> complex:
    """Order of the cylinder functions solving the axial channel equation.

    sqrt(eta^2 (1+slope^2) - 1/4) / slope on the principal branch: purely
    imaginary (positive imaginary part) for eta = 0, real for |eta| >= 1.
    """
    if slope <= 0:
        raise ValueError("slope must be positive")
    val = cmath.sqrt(eta**2 * (1.0 + slope**2) - 0.25) / slope
    if val.imag < 0:
        val = -val
    return val


def channel(eta: int, slope: float) -> ChannelIndex:
    return ChannelIndex(int(eta), bessel_order(eta, slope))


# ---------------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------------

def _shoot(slope, aspect, eta, s, rtol=_REFINE_RTOL, t_eval=None, dense=False):
    """Integrate the axial ODE from zeta=0 with Z(0)=0, Z'(0)=1."""
    q0 = 0.25 - eta**2 * (1.0 + slope**2)
    s_eff = s * (1.0 + slope**2)

    def rhs(zeta, y):
        u = 1.0 + slope * zeta
        return (y[1], -(slope / u) * y[1] - (q0 / (u * u) + s_eff) * y[0])

    sol = solve_ivp(rhs, (0.0, aspect), (0.0, 1.0), method="DOP853",
                    rtol=rtol, atol=1e-13, t_eval=t_eval,
                    dense_output=dense)
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise IntegrationError(
            f"axial integration failed at s={s}: {sol.message}")
    return sol


def axial_residual(cone: ConeGeometry, eta: int, c: float,
                   rtol: float = _REFINE_RTOL) -> float:
    """Shooting mismatch Z(z_max) for trial level c = rho sqrt(2 m omega)/hbar.

    Continuous in c; its positive zeros are exactly the bound-state levels
    (in units of the small rim radius).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    return _residual_s(cone.slope, cone.aspect, eta, c * c, rtol)


def _residual_s(slope, aspect, eta, s, rtol=_REFINE_RTOL):
    sol = _shoot(slope, aspect, eta, s, rtol=rtol)
    return float(sol.y[0, -1])


def _interior_nodes(slope, aspect, eta, s, samples=1200):
    """Sign changes of the shot solution strictly inside (0, z_max)."""
    zeta = np.linspace(0.0, aspect, samples)
    sol = _shoot(slope, aspect, eta, s, rtol=1e-9, t_eval=zeta)
    z = sol.y[0]
    # trim the clamped end and the launch point; a root sitting exactly on
    # the far wall (i.e. s at an eigenvalue) must not count as a node
    interior = z[1:-1]
    interior = interior[np.abs(interior) > 1e-9 * np.max(np.abs(z))]
    return int(np.sum(np.sign(interior[1:]) != np.sign(interior[:-1])))


def _refine_root(slope, aspect, eta, lo, hi):
    f = lambda s: _residual_s(slope, aspect, eta, s)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        # coarse-scan sign was off by less than its tolerance; widen a touch
        pad = 0.25 * (hi - lo)
        lo, hi = lo - pad, hi + pad
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:
            raise BracketingError("lost the sign change while refining a root")
    return brentq(f, lo, hi, xtol=1e-12)


def find_surface_energies(cone: ConeGeometry, eta: int, count: int,
                          ) -> np.ndarray:
    """Lowest dimensionless surface energies s_n = 2 m omega_n rho^2/hbar^2.

    Unlike :func:`find_eigenvalues` this admits negative energies (possible
    for eta = 0 on long, gently sloped cones, where the curvature-induced
    well outweighs the axial confinement).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    slope, aspect, eta = cone.slope, cone.aspect, abs(int(eta))
    one = 1.0 + slope**2
    # potential floor of the equivalent self-adjoint problem bounds s below
    u_ends = (1.0, 1.0 + slope * aspect)
    floor = min((eta**2 * one - 0.25) / (u * u * one) for u in u_ends)
    s = min(floor, 0.0) - 0.02
    ds = 0.45 * math.pi**2 / (aspect**2 * one)
    ceiling = s + (count + 6) ** 2 * math.pi**2 / (aspect**2 * one) * 4 + 10.0
    roots = []
    v = _residual_s(slope, aspect, eta, s, rtol=_SCAN_RTOL)
    while len(roots) < count:
        if s > ceiling:
            raise BracketingError(
                f"found {len(roots)}/{count} levels before the scan ceiling")
        s2 = s + ds
        v2 = _residual_s(slope, aspect, eta, s2, rtol=_SCAN_RTOL)
        if v == 0.0 or v * v2 < 0:
            roots.append(_refine_root(slope, aspect, eta, s, s2))
        s, v = s2, v2
    _certify_complete(slope, aspect, eta, roots)
    return np.asarray(roots)


def find_eigenvalues(cone: ConeGeometry, eta: int, count: int,
                     scan_step: float = 0.02) -> np.ndarray:
    """Lowest ``count`` levels c_n = rho sqrt(2 m omega_n)/hbar, ascending.

    Scans the shooting residual upward in c (default step 0.02) and refines
    each sign change by bracketed root finding to |dc| well below 1e-8.
    Completeness is certified by the oscillation count of the last mode.
    Raises if a requested level has omega <= 0 (see
    :func:`find_surface_energies` for those).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    slope, aspect, eta = cone.slope, cone.aspect, abs(int(eta))
    if eta == 0 and _interior_nodes(slope, aspect, eta, 0.0) > 0:
        raise ValueError(
            "levels with negative surface energy exist for this cone; "
            "use find_surface_energies instead")
    one = 1.0 + slope**2
    c_ceiling = (count + 5) * math.pi / (aspect * math.sqrt(one)) * 2 + 5.0
    roots = []
    c = 0.0   # seed at the bottom so a root below the first step is caught
    v = _residual_s(slope, aspect, eta, 0.0, rtol=_SCAN_RTOL)
    while len(roots) < count:
        if c > c_ceiling:
            raise BracketingError(
                f"found {len(roots)}/{count} levels before the scan ceiling")
        c2 = c + scan_step
        v2 = _residual_s(slope, aspect, eta, c2 * c2, rtol=_SCAN_RTOL)
        if v == 0.0 or v * v2 < 0:
            s_root = _refine_root(slope, aspect, eta, c * c, c2 * c2)
            roots.append(math.sqrt(s_root))
        c, v = c2, v2
    _certify_complete(slope, aspect, eta, [r * r for r in roots])
    return np.asarray(roots)


def _certify_complete(slope, aspect, eta, s_roots):
    # mode n oscillates exactly n times inside the walls, so the node count
    # of the highest root certifies that none below it was skipped
    n_last = _interior_nodes(slope, aspect, eta, s_roots[-1])
    if n_last != len(s_roots) - 1:
        raise BracketingError(
            f"level scan skipped a root: top mode has {n_last} nodes "
            f"for {len(s_roots)} levels")


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------

def mode_from_energy(cone: ConeGeometry, eta: int, omega_scaled: float,
                     grid=None, mass_ratio: float = 1.0,
                     index_n: int | None = None) -> AxialMode:
    """Normalized axial mode at a validated surface energy (any sign)."""
    slope, aspect = cone.slope, cone.aspect
    eta = abs(int(eta))
    s = float(omega_scaled)
    sol = _shoot(slope, aspect, eta, s, rtol=_REFINE_RTOL, dense=True)
    # fine internal grid for normalization and validation
    zeta_f = np.linspace(0.0, aspect, 8193)
    Zf = sol.sol(zeta_f)[0]
    peak = np.max(np.abs(Zf))
    if abs(Zf[-1]) > 1e-6 * peak:
        raise ValueError(
            f"omega_scaled={s} is not an eigenvalue: wall mismatch "
            f"{abs(Zf[-1]) / peak:.2e}")
    w_f = (1.0 + slope * zeta_f) * math.sqrt(1.0 + slope**2)
    norm_sq = simpson(Zf**2 * w_f, x=zeta_f) * cone.radius**2
    if not (np.isfinite(norm_sq) and norm_sq > 0):
        raise ValueError("normalization integral is not finite")

    if grid is None:
        grid = np.linspace(0.0, cone.length, DEFAULT_GRID_POINTS)
    else:
        grid = np.asarray(grid, dtype=float)
    Z = sol.sol(grid / cone.radius)[0] / math.sqrt(norm_sq)
    Z[grid == 0.0] = 0.0
    Z[grid == cone.length] = 0.0   # wall values are exact zeros by definition

    if index_n is None:
        index_n = _interior_nodes(slope, aspect, eta, s)
    omega_mev = s * constants.kinetic_factor(mass_ratio) / cone.radius**2
    c_val = math.sqrt(s) if s > 0 else math.nan
    weight = (cone.radius + cone.slope * grid) * math.sqrt(1.0 + slope**2)
    return AxialMode(channel=channel(eta, slope), index_n=int(index_n),
                     c_value=c_val, omega=omega_mev, omega_scaled=s,
                     z_grid=grid, Z_samples=Z, weight=weight,
                     mass_ratio=mass_ratio)


def eigenfunction(cone: ConeGeometry, eta: int, c_n: float, grid=None,
                  mass_ratio: float = 1.0) -> AxialMode:
    """Normalized axial mode for a validated level c_n (omega > 0)."""
    if c_n <= 0:
        raise ValueError("c_n must be positive")
    return mode_from_energy(cone, eta, c_n * c_n, grid=grid,
                            mass_ratio=mass_ratio)


# ---------------------------------------------------------------------------
# Independent routes
# ---------------------------------------------------------------------------

def fd_surface_energies(cone: ConeGeometry, eta: int, n_points: int,
                        count: int) -> np.ndarray:
    """Lowest surface energies from the self-adjoint finite-difference matrix.

    Central differences of (1/w)(p Z')' on ``n_points`` interior points with
    p evaluated at half points and Dirichlet walls; converges at second
    order in the grid spacing.  Fully independent of the shooting route.
    """
    if n_points < 200:
        raise ValueError("n_points must be >= 200")
    if count < 1 or count > n_points:
        raise ValueError("count out of range")
    slope, aspect, eta = cone.slope, cone.aspect, abs(int(eta))
    one = 1.0 + slope**2
    step = aspect / (n_points + 1)
    zeta = step * np.arange(1, n_points + 1)
    u = 1.0 + slope * zeta
    u_half = 1.0 + slope * (zeta + step / 2)          # includes right wall
    u_half_left = 1.0 + slope * (zeta - step / 2)
    p_r = u_half / math.sqrt(one)
    p_l = u_half_left / math.sqrt(one)
    w = u * math.sqrt(one)
    v_pot = (0.25 - eta**2 * one) / (u * u * one)     # -V of the operator
    diag = (p_l + p_r) / step**2 / w - v_pot
    off = -p_r[:-1] / step**2 / np.sqrt(w[:-1] * w[1:])
    try:
        vals = eigh_tridiagonal(diag, off, select="i",
                                select_range=(0, count - 1),
                                eigvals_only=True)
    except np.linalg.LinAlgError as exc:   # pragma: no cover - LAPACK failure
        raise RuntimeError(f"tridiagonal eigensolve failed: {exc}") from exc
    return np.asarray(vals)


def fd_spectrum(cone: ConeGeometry, eta: int, n_points: int,
                count: int) -> np.ndarray:
    """Lowest ``count`` c_n from the finite-difference route (omega > 0)."""
    s = fd_surface_energies(cone, eta, n_points, count)
    if np.any(s <= 0):
        raise ValueError(
            "negative surface energies present; use fd_surface_energies")
    return np.sqrt(s)


def bessel_cross_product_residual(cone: ConeGeometry, eta: int,
                                  c: float) -> float:
    """Closed-form quantization condition evaluated by power series.

    Y_d(b) J_d(b u_max) - J_d(b) Y_d(b u_max) with b = c sqrt(1+slope^2)/slope
    and u_max = 1 + slope*length/radius; its zeros coincide with the shooting
    levels.  Used as an independent cross-check of the ODE route.
    """
    slope, aspect = cone.slope, cone.aspect
    d = bessel_order(eta, slope)
    b = c * math.sqrt(1.0 + slope**2) / slope
    u_max = 1.0 + slope * aspect
    val = (bessely_series(d, b) * besselj_series(d, b * u_max)
           - besselj_series(d, b) * bessely_series(d, b * u_max))
    return float(np.real_if_close(val, tol=1e6).real)


def closed_form_axial(cone: ConeGeometry, eta: int, c_n: float, grid):
    """Un-normalized closed-form axial solution on ``grid`` (complex).

    J_d(b u) - (J_d(b)/Y_d(b)) Y_d(b u); proportional to the real shooting
    solution up to a complex constant, so probability densities agree after
    normalization.
    """
    slope = cone.slope
    d = bessel_order(eta, slope)
    b = c_n * math.sqrt(1.0 + slope**2) / slope
    u = 1.0 + slope * np.asarray(grid, dtype=float) / cone.radius
    ratio = besselj_series(d, b) / bessely_series(d, b)
    return besselj_series(d, b * u) - ratio * bessely_series(d, b * u)


# ---------------------------------------------------------------------------
# Expectation values
# ---------------------------------------------------------------------------

def gp_expectation(cone: ConeGeometry, mode: AxialMode,
                   mass_ratio: float) -> float:
    """Expectation of the curvature-induced potential in the mode, meV.

    integral U(z) |Z(z)|^2 w(z) dz over the wall; always negative.
    """
    z = mode.z_grid
    U = geometric_potential_at(cone.generatrix(), z, mass_ratio).U
    return float(simpson(U * mode.density(), x=z))


def gp_energy_fraction(cone: ConeGeometry, eta: int = 0) -> float:
    """|<U>| / omega for the ground state; dimensionless and mass-free.

    NaN when the ground surface energy is not positive (the ratio loses
    meaning once the curvature well dominates).
    """
    s0 = find_surface_energies(cone, eta, 1)[0]
    if s0 <= 0:
        return math.nan
    mode = mode_from_energy(cone, eta, s0, mass_ratio=1.0)
    return abs(gp_expectation(cone, mode, 1.0)) / mode.omega
