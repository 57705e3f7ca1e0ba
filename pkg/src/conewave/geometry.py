"""Metric, curvature, and curvature-induced potential on surfaces of revolution.

A surface of revolution is generated by rotating a positive profile curve
(the generatrix) f(z) about the z axis.  In the (theta, z) surface
coordinates the reduced metric is diagonal,

    g = diag(f^2, 1 + f'^2),        sqrt(g) = f sqrt(1 + f'^2),

and the shape (Weingarten) operator is

    alpha = diag( 1/(f sqrt(1+f'^2)),  -f'' / (1+f'^2)^(3/2) ).

Its eigenvalues are the principal curvatures; M = tr(alpha)/2 and
K = det(alpha) are the mean and Gaussian curvature.  Squeezing a particle
onto the surface produces the attractive potential

    U = -(hbar^2/2m) (M^2 - K)
      = -(hbar^2/2m) (1 + f'^2 + f f'')^2 / (4 f^2 (1+f'^2)^3),

which is <= 0 everywhere because M^2 - K = (kappa1 - kappa2)^2 / 4.

Lengths are nm, masses are m/m_e ratios, energies come out in meV.
All functions accept scalar or array z and are pure (safe to call from any
number of workers).
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import constants


class DomainError(ValueError):
    """z lies outside the generatrix's declared domain."""


# ---------------------------------------------------------------------------
# Generatrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    """Constant-radius generatrix f(z) = radius."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def domain(self):
        return (-math.inf, math.inf)

    def profile(self, z):
        z = np.asarray(z, dtype=float)
        return (np.full_like(z, self.radius), np.zeros_like(z),
                np.zeros_like(z))


@dataclass(frozen=True)
class Cone:
    """Straight-cone generatrix f(z) = radius + slope * z.

    ``radius`` is the radius at z = 0; ``slope`` is the tangent of the
    half-opening angle between the generatrix and the axis (positive).
    """

    radius: float
    slope: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.slope <= 0:
            raise ValueError(f"slope must be positive, got {self.slope}")

    @property
    def domain(self):
        # f > 0 requires z > -radius/slope
        return (-self.radius / self.slope, math.inf)

    def profile(self, z):
        z = np.asarray(z, dtype=float)
        return (self.radius + self.slope * z,
                np.full_like(z, self.slope), np.zeros_like(z))


@dataclass(frozen=True)
class JunctionGeometry:
    """Cone-like junction between two coaxial cylinders.

    The radius runs from ``r_in`` (z <= -half_length) to ``r_out``
    (z >= +half_length) through a straight taper capped by two parabolic
    arcs of axial extent ``smooth_len``, which make the profile C^1:

        rho(z) = r_in,                                   z <= -a
                 -xi (z+a)^2 + r_in,                 -a < z <= -a+eps
                 -2 eps xi z + (r_in+r_out)/2,    -a+eps < z <= a-eps
                 +xi (z-a)^2 + r_out,              a-eps < z <= a
                 r_out,                                  z > a

    with a = half_length, eps = smooth_len and the parabola coefficient
    xi = (r_in - r_out) / (4 eps a - 2 eps^2) fixed by continuity of the
    first derivative.  rho'' is piecewise constant and jumps at the four
    branch points -a, -a+eps, a-eps, a, so the curvature-induced potential
    is discontinuous there (wells form at the two smooth transitions).
    """

    r_in: float
    r_out: float
    half_length: float
    smooth_len: float

    def __post_init__(self):
        if self.r_in <= 0 or self.r_out <= 0:
            raise ValueError("junction radii must be positive")
        if not 0 < self.smooth_len < self.half_length:
            raise ValueError(
                f"need 0 < smooth_len < half_length, got smooth_len="
                f"{self.smooth_len}, half_length={self.half_length}")

    @property
    def parabola_coeff(self) -> float:
        """Coefficient of the parabolic caps; zero for equal radii."""
        a, eps = self.half_length, self.smooth_len
        return (self.r_in - self.r_out) / (4 * eps * a - 2 * eps**2)

    @property
    def branch_points(self):
        a, eps = self.half_length, self.smooth_len
        return (-a, -a + eps, a - eps, a)

    @property
    def domain(self):
        return (-math.inf, math.inf)

    def profile(self, z):
        z = np.asarray(z, dtype=float)
        a, eps = self.half_length, self.smooth_len
        xi = self.parabola_coeff
        mid = 0.5 * (self.r_in + self.r_out)
        rho = np.where(
            z <= -a, self.r_in,
            np.where(z <= -a + eps, -xi * (z + a)**2 + self.r_in,
                     np.where(z <= a - eps, -2 * eps * xi * z + mid,
                              np.where(z <= a, xi * (z - a)**2 + self.r_out,
                                       self.r_out))))
        rho_p = np.where(
            z <= -a, 0.0,
            np.where(z <= -a + eps, -2 * xi * (z + a),
                     np.where(z <= a - eps, -2 * eps * xi,
                              np.where(z <= a, 2 * xi * (z - a), 0.0))))
        rho_pp = np.where(
            z <= -a, 0.0,
            np.where(z <= -a + eps, -2 * xi,
                     np.where(z <= a - eps, 0.0,
                              np.where(z <= a, 2 * xi, 0.0))))
        return rho, rho_p, rho_pp


@dataclass(frozen=True)
class TabulatedGeneratrix:
    """Generatrix interpolated from (z, f) samples.

    A C^2 cubic spline is fitted and differentiated analytically, so the
    second derivative is piecewise linear.  The samples are assumed smooth;
    at least 4 strictly increasing z values with f > 0 are required.
    """

    z_samples: np.ndarray
    f_samples: np.ndarray
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        z = np.asarray(self.z_samples, dtype=float)
        f = np.asarray(self.f_samples, dtype=float)
        if z.ndim != 1 or z.size < 4:
            raise ValueError("need at least 4 sample points")
        if f.shape != z.shape:
            raise ValueError("z_samples and f_samples must have equal length")
        if not np.all(np.diff(z) > 0):
            raise ValueError("z_samples must be strictly increasing")
        if np.any(f <= 0):
            raise ValueError("generatrix samples must be positive")
        object.__setattr__(self, "z_samples", z)
        object.__setattr__(self, "f_samples", f)
        object.__setattr__(self, "_spline", CubicSpline(z, f))

    @property
    def domain(self):
        return (float(self.z_samples[0]), float(self.z_samples[-1]))

    def profile(self, z):
        z = np.asarray(z, dtype=float)
        s = self._spline
        return s(z), s(z, 1), s(z, 2)


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricSample:
    g_theta_theta: np.ndarray   # f^2, nm^2
    g_zz: np.ndarray            # 1 + f'^2, dimensionless
    sqrt_g: np.ndarray          # f sqrt(1+f'^2), nm


@dataclass(frozen=True)
class CurvatureSample:
    alpha_11: np.ndarray        # azimuthal principal curvature, 1/nm
    alpha_22: np.ndarray        # meridional principal curvature, 1/nm
    mean: np.ndarray            # M = tr(alpha)/2, 1/nm
    gauss: np.ndarray           # K = det(alpha), 1/nm^2


@dataclass(frozen=True)
class GeometricPotentialSample:
    U: np.ndarray               # meV, always <= 0


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _checked_profile(gen, z):
    z = np.asarray(z, dtype=float)
    lo, hi = gen.domain
    if np.any(z < lo) or np.any(z > hi):
        raise DomainError(f"z outside generatrix domain [{lo}, {hi}]")
    f, fz, fzz = gen.profile(z)
    if np.any(f <= 0):
        raise DomainError("generatrix radius is non-positive at requested z")
    return f, fz, fzz


def metric_at(gen, z) -> MetricSample:
    """Reduced metric of the revolution surface at height z."""
    f, fz, _ = _checked_profile(gen, z)
    gzz = 1.0 + fz**2
    return MetricSample(f**2, gzz, f * np.sqrt(gzz))


def curvature_at(gen, z) -> CurvatureSample:
    """Principal curvatures and their mean/Gaussian combinations at z."""
    f, fz, fzz = _checked_profile(gen, z)
    root = np.sqrt(1.0 + fz**2)
    a11 = 1.0 / (f * root)
    a22 = -fzz / root**3
    return CurvatureSample(a11, a22, 0.5 * (a11 + a22), a11 * a22)


def curvature_invariant(gen, z):
    """M^2 - K = (1+f'^2+f f'')^2 / (4 f^2 (1+f'^2)^3), in 1/nm^2.

    Non-negative for every surface; equals (kappa1-kappa2)^2/4.
    """
    f, fz, fzz = _checked_profile(gen, z)
    g = 1.0 + fz**2
    return (g + f * fzz)**2 / (4.0 * f**2 * g**3)


def geometric_potential_at(gen, z, mass_ratio: float = 1.0) -> GeometricPotentialSample:
    """Curvature-induced potential U = -(hbar^2/2m)(M^2 - K) in meV."""
    scale = constants.kinetic_factor(mass_ratio)
    return GeometricPotentialSample(-scale * curvature_invariant(gen, z))


def junction_profile(junction: JunctionGeometry, z):
    """Radius rho and derivatives (rho, rho', rho'') of the junction at z.

    rho and rho' are continuous everywhere; rho'' is piecewise constant
    with jumps at the four branch points.
    """
    return junction.profile(z)
