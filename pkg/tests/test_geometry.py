import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conewave import constants
from conewave.geometry import (Cone, Cylinder, DomainError, JunctionGeometry,
                               TabulatedGeneratrix, curvature_at,
                               curvature_invariant, geometric_potential_at,
                               junction_profile, metric_at)


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------

def test_metric_cylinder_unit():
    m = metric_at(Cylinder(1.0), 0.0)
    assert m.g_theta_theta == 1.0
    assert m.g_zz == 1.0
    assert m.sqrt_g == 1.0


def test_metric_cone():
    # f = 1 + z, so at z=2: f=3, f'=1
    m = metric_at(Cone(1.0, 1.0), 2.0)
    assert m.g_theta_theta == pytest.approx(9.0, rel=1e-15)
    assert m.g_zz == pytest.approx(2.0, rel=1e-15)
    assert m.sqrt_g == pytest.approx(3.0 * math.sqrt(2.0), rel=1e-15)


def test_metric_junction_in_lead():
    # beyond the junction the profile is the flat inlet cylinder
    j = JunctionGeometry(40.0, 2.0, 10.0, 2.0)
    m = metric_at(j, -11.0)
    assert m.g_theta_theta == pytest.approx(1600.0, rel=1e-15)
    assert m.g_zz == pytest.approx(1.0, rel=1e-15)


def test_metric_domain_errors():
    with pytest.raises(DomainError):
        metric_at(Cone(1.0, 1.0), -2.0)      # f <= 0 there
    tab = TabulatedGeneratrix(np.linspace(0, 1, 8), np.full(8, 2.0))
    with pytest.raises(DomainError):
        metric_at(tab, 1.5)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def test_curvature_cylinder():
    c = curvature_at(Cylinder(2.0), 13.7)
    assert c.alpha_11 == pytest.approx(0.5, rel=1e-15)
    assert c.alpha_22 == 0.0
    assert c.mean == pytest.approx(0.25, rel=1e-15)
    assert c.gauss == 0.0


def test_curvature_cone():
    c = curvature_at(Cone(1.0, 1.0), 0.0)
    assert c.alpha_11 == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)
    assert c.alpha_22 == 0.0
    assert c.gauss == 0.0


def test_curvature_sphere_tabulated():
    # unit sphere patch without a knot at the apex; spline-limited accuracy
    z = np.linspace(-0.6, 0.6, 200)
    tab = TabulatedGeneratrix(z, np.sqrt(1.0 - z**2))
    c = curvature_at(tab, 0.0)
    assert c.mean == pytest.approx(1.0, abs=1e-4)
    assert c.gauss == pytest.approx(1.0, abs=1e-4)


def test_sphere_tabulated_convergence_rate():
    # halving the sample spacing should shrink the error at ~second order
    def errs(n):
        z = np.linspace(-0.6, 0.6, n)
        tab = TabulatedGeneratrix(z, np.sqrt(1.0 - z**2))
        c = curvature_at(tab, 0.0)
        return abs(c.mean - 1.0), abs(c.gauss - 1.0)

    e100, e200 = errs(100), errs(200)
    for coarse, fine in zip(e100, e200):
        assert coarse / fine > 2.5       # observed ~4 (order 2)


# ---------------------------------------------------------------------------
# curvature-induced potential
# ---------------------------------------------------------------------------

def test_gp_cylinder_closed_form():
    # matches the -(hbar^2/2m)/(4R^2) offset of a cylindrical lead
    R, mass = 3.0, 0.173
    u = geometric_potential_at(Cylinder(R), 5.0, mass).U
    assert u == pytest.approx(-constants.kinetic_factor(mass) / (4 * R * R),
                              rel=1e-14)


def test_gp_cone_dimensionless_value():
    # unit-radius cone with slope 1: U(0) = -1/8 in hbar^2/(2 m rho^2) units
    u = geometric_potential_at(Cone(1.0, 1.0), 0.0, 1.0).U
    assert u / constants.HBAR2_OVER_2ME == pytest.approx(-0.125, rel=1e-14)


def test_gp_cone_closed_form_along_wall():
    gen = Cone(2.0, 0.7)
    z = np.linspace(0.0, 5.0, 11)
    u = geometric_potential_at(gen, z, 1.0).U
    f = 2.0 + 0.7 * z
    expected = -constants.HBAR2_OVER_2ME / (8.0 * f**2 * (1 + 0.49)) * 2.0
    assert np.allclose(u, expected, rtol=1e-12)


def test_gp_junction_linear_segment():
    j = JunctionGeometry(40.0, 2.0, 10.0, 2.0)
    xi = j.parabola_coeff
    z = 0.0
    rho, rho_p, rho_pp = junction_profile(j, z)
    assert rho_pp == 0.0
    u = geometric_potential_at(j, z, 0.173).U
    kf = constants.kinetic_factor(0.173)
    assert u == pytest.approx(-kf / (4 * rho**2 * (1 + (2 * 2.0 * xi)**2)),
                              rel=1e-12)


# ---------------------------------------------------------------------------
# junction profile
# ---------------------------------------------------------------------------

def test_junction_profile_branch_values():
    j = JunctionGeometry(40.0, 2.0, 10.0, 2.0)
    rho, rho_p, _ = junction_profile(j, -10.0)
    assert rho == 40.0 and rho_p == 0.0
    # midpoint of the straight taper
    rho, rho_p, rho_pp = junction_profile(j, 0.0)
    xi = (40.0 - 2.0) / (4 * 2 * 10 - 2 * 4)
    assert xi == pytest.approx(38.0 / 72.0, rel=1e-15)
    assert rho == pytest.approx(21.0, rel=1e-14)
    assert rho_p == pytest.approx(-2 * 2.0 * xi, rel=1e-14)
    assert rho_pp == 0.0


def test_junction_flat_when_radii_equal():
    j = JunctionGeometry(5.0, 5.0, 10.0, 2.0)
    z = np.linspace(-15, 15, 301)
    rho, rho_p, rho_pp = junction_profile(j, z)
    assert np.all(rho == 5.0)
    assert np.all(rho_p == 0.0)
    assert np.all(rho_pp == 0.0)


def test_junction_continuity_and_jumps():
    j = JunctionGeometry(40.0, 2.0, 10.0, 2.0)
    xi = j.parabola_coeff
    eps = 1e-9
    for bp in j.branch_points:
        rl, pl, _ = junction_profile(j, bp - eps)
        rr, pr, _ = junction_profile(j, bp + eps)
        assert rl == pytest.approx(rr, abs=1e-7 * 40)
        assert pl == pytest.approx(pr, abs=1e-7)
    # curvature of the profile jumps by the analytic branch values
    _, _, left = junction_profile(j, -10.0 - 1e-12)
    _, _, right = junction_profile(j, -10.0 + 1e-6)
    assert left == 0.0 and right == pytest.approx(-2 * xi, rel=1e-12)
    _, _, cap = junction_profile(j, 9.5)
    assert cap == pytest.approx(2 * xi, rel=1e-12)


def test_junction_validation():
    with pytest.raises(ValueError):
        JunctionGeometry(40.0, 2.0, 10.0, 12.0)   # eps >= a
    with pytest.raises(ValueError):
        JunctionGeometry(40.0, 2.0, 10.0, 0.0)
    with pytest.raises(ValueError):
        JunctionGeometry(-1.0, 2.0, 10.0, 2.0)


# ---------------------------------------------------------------------------
# tabulated generatrix validation
# ---------------------------------------------------------------------------

def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedGeneratrix([0, 1, 2], [1, 1, 1])            # too few
    with pytest.raises(ValueError):
        TabulatedGeneratrix([0, 1, 1, 2], [1, 1, 1, 1])      # not increasing
    with pytest.raises(ValueError):
        TabulatedGeneratrix([0, 1, 2, 3], [1, 1, -1, 1])     # non-positive f


# ---------------------------------------------------------------------------
# invariants (property tests)
# ---------------------------------------------------------------------------

cones = st.builds(Cone,
                  radius=st.floats(0.1, 50.0),
                  slope=st.floats(0.02, 8.0))
cylinders = st.builds(Cylinder, radius=st.floats(0.1, 50.0))


@st.composite
def junctions(draw):
    r_out = draw(st.floats(0.5, 10.0))
    ratio = draw(st.floats(1.0, 30.0))
    a = draw(st.floats(1.0, 50.0))
    frac = draw(st.floats(0.05, 0.95))
    return JunctionGeometry(r_out * ratio, r_out, a, frac * a)


@settings(max_examples=60, deadline=None)
@given(gen=st.one_of(cones, cylinders, junctions()),
       frac=st.floats(0.0, 1.0))
def test_gp_never_positive_and_identity(gen, frac):
    if isinstance(gen, JunctionGeometry):
        z = (2 * frac - 1) * 2 * gen.half_length
    elif isinstance(gen, Cone):
        z = frac * 3 * gen.radius
    else:
        z = (2 * frac - 1) * 100.0
    inv = curvature_invariant(gen, z)
    assert inv >= 0.0
    u = geometric_potential_at(gen, z, 1.0).U
    assert u <= 0.0
    # (tr/2)^2 - det route agrees with the closed form to machine precision
    c = curvature_at(gen, z)
    direct = c.mean**2 - c.gauss
    scale = max(abs(c.mean) ** 2, abs(c.gauss), abs(inv), 1e-300)
    assert abs(direct - inv) <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(j=junctions())
def test_junction_c1_everywhere(j):
    # straddling a branch point by e, the slope may legitimately change by
    # up to |rho''| * 2e; anything beyond that would be a real jump
    e = 1e-7 * j.half_length
    xi = abs(j.parabola_coeff)
    slope_scale = max(1.0, 2 * xi * j.smooth_len)
    for bp in j.branch_points:
        rl, pl, _ = junction_profile(j, bp - e)
        rr, pr, _ = junction_profile(j, bp + e)
        assert abs(rl - rr) <= 2 * slope_scale * e + 1e-12 * j.r_in
        assert abs(pl - pr) <= 4 * xi * e + 1e-12 * slope_scale
