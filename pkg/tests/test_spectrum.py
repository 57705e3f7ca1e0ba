import math

import numpy as np
import pytest
from scipy.integrate import quad, simpson, solve_ivp

import conewave.spectrum as spec
from conewave.spectrum import (BracketingError, ConeGeometry, axial_residual,
                               bessel_cross_product_residual, bessel_order,
                               closed_form_axial, eigenfunction, fd_spectrum,
                               fd_surface_energies, find_eigenvalues,
                               find_surface_energies, gp_energy_fraction,
                               gp_expectation, mode_from_energy)

UNIT_CONE = ConeGeometry(1.0, 1.0, 1.5)
TALL_CONE = ConeGeometry(1.0, 1.0, 4.0)

# four-digit reference levels for the slope-1 cone, eta = 0
REF_SHORT = (1.451, 2.946, 4.432)
REF_TALL = (0.5233, 1.091, 1.652)


def cylinder_levels(aspect, eta, count):
    # closed form for the slope->0 limit: c^2 = (n pi/aspect)^2 - 1/4 + eta^2
    return [math.sqrt((n * math.pi / aspect)**2 - 0.25 + eta**2)
            for n in range(1, count + 1)]


# ---------------------------------------------------------------------------
# channel order
# ---------------------------------------------------------------------------

def test_bessel_order_values():
    assert bessel_order(0, 1.0) == pytest.approx(0.5j, rel=1e-15)
    assert bessel_order(0, 2.0) == pytest.approx(0.25j, rel=1e-15)
    assert bessel_order(1, 1.0) == pytest.approx(math.sqrt(1.75), rel=1e-12)
    assert bessel_order(-2, 1.3) == bessel_order(2, 1.3)
    # principal branch: non-negative imaginary part
    assert bessel_order(0, 0.37).imag > 0


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------

def test_residual_small_at_reference_level():
    # the 4-digit level sits within its rounding of the true root
    assert abs(axial_residual(UNIT_CONE, 0, 1.451)) < 1e-3
    assert abs(axial_residual(UNIT_CONE, 0, 1.450851145)) < 1e-8


def test_residual_brackets_second_level():
    # no root between 2.0 and 2.9; the sign flips across 2.946
    r20 = axial_residual(UNIT_CONE, 0, 2.0)
    r29 = axial_residual(UNIT_CONE, 0, 2.9)
    r30 = axial_residual(UNIT_CONE, 0, 3.0)
    assert r20 * r29 > 0
    assert r20 * r30 < 0


def test_residual_cylinder_limit():
    cyl = ConeGeometry(1.0, 1e-6, 1.5)
    c = cylinder_levels(1.5, 0, 1)[0]
    assert abs(axial_residual(cyl, 0, c)) < 1e-5


def test_residual_rejects_nonpositive_c():
    with pytest.raises(ValueError):
        axial_residual(UNIT_CONE, 0, -0.5)


def test_integration_failure_is_distinct(monkeypatch):
    class FakeSol:
        success = False
        message = "step size underflow"
        y = np.zeros((2, 1))

    monkeypatch.setattr(spec, "solve_ivp", lambda *a, **k: FakeSol())
    with pytest.raises(spec.IntegrationError):
        axial_residual(UNIT_CONE, 0, 1.0)


# ---------------------------------------------------------------------------
# levels
# ---------------------------------------------------------------------------

def test_reference_levels_short_cone():
    cs = find_eigenvalues(UNIT_CONE, 0, 3)
    for c, ref in zip(cs, REF_SHORT):
        assert abs(c - ref) / ref < 1e-3


def test_reference_levels_tall_cone():
    cs = find_eigenvalues(TALL_CONE, 0, 3)
    for c, ref in zip(cs, REF_TALL):
        assert abs(c - ref) / ref < 1e-3


def test_cylinder_limit_levels():
    cyl = ConeGeometry(1.0, 1e-6, 1.5)
    for eta in (0, 1):
        cs = find_eigenvalues(cyl, eta, 3)
        for c, ref in zip(cs, cylinder_levels(1.5, eta, 3)):
            assert abs(c - ref) / ref < 1e-3


def test_negative_eta_same_spectrum():
    plus = find_eigenvalues(UNIT_CONE, 1, 2)
    minus = find_eigenvalues(UNIT_CONE, -1, 2)
    assert np.allclose(plus, minus, rtol=1e-12)


def test_scale_invariance():
    scaled = ConeGeometry(2.5, 1.0, 3.75)      # same aspect 1.5
    assert np.allclose(find_eigenvalues(scaled, 0, 2),
                       find_eigenvalues(UNIT_CONE, 0, 2), rtol=1e-12)


def test_levels_strictly_increasing_and_complete():
    cs = find_eigenvalues(TALL_CONE, 0, 4)
    assert np.all(np.diff(cs) > 0)
    # refined rescan between consecutive roots finds no extra sign change
    for lo, hi in zip(cs[:-1], cs[1:]):
        grid = np.arange(lo + 0.002, hi - 0.002, 0.002)
        vals = np.array([axial_residual(TALL_CONE, 0, c, rtol=1e-8)
                         for c in grid])
        assert np.all(np.sign(vals) == np.sign(vals[0]))


def test_bracketing_error_when_count_unreachable(monkeypatch):
    monkeypatch.setattr(spec, "_certify_complete", lambda *a: None)
    # residual with no zeros: pretend the wall value never flips sign
    monkeypatch.setattr(spec, "_residual_s", lambda *a, **k: 1.0)
    with pytest.raises(BracketingError):
        find_eigenvalues(UNIT_CONE, 0, 1)


def test_negative_energy_ground_state():
    # long, gently sloped cone: curvature well beats axial confinement
    cone = ConeGeometry(1.0, 0.1, 10.0)
    s = find_surface_energies(cone, 0, 2)
    assert s[0] < 0 < s[1]
    fd = fd_surface_energies(cone, 0, 4000, 2)
    assert np.allclose(s, fd, rtol=2e-4, atol=2e-6)
    with pytest.raises(ValueError, match="negative surface energy"):
        find_eigenvalues(cone, 0, 1)


# ---------------------------------------------------------------------------
# eigenfunctions
# ---------------------------------------------------------------------------

def test_mode_normalization_and_walls():
    c1 = find_eigenvalues(UNIT_CONE, 0, 1)[0]
    mode = eigenfunction(UNIT_CONE, 0, c1)
    assert mode.Z_samples[0] == 0.0
    assert mode.Z_samples[-1] == 0.0
    norm = simpson(mode.density(), x=mode.z_grid)
    assert abs(norm - 1.0) < 1e-8


def test_mode_node_counts():
    cs = find_eigenvalues(UNIT_CONE, 0, 5)
    for n, c in enumerate(cs):
        mode = eigenfunction(UNIT_CONE, 0, c)
        assert mode.index_n == n
        signs = np.sign(mode.Z_samples[1:-1])
        signs = signs[signs != 0]
        assert int(np.sum(signs[1:] != signs[:-1])) == n


def test_ground_density_leans_to_small_rim():
    c1 = find_eigenvalues(UNIT_CONE, 0, 1)[0]
    mode = eigenfunction(UNIT_CONE, 0, c1)
    assert mode.z_grid[np.argmax(mode.density())] < UNIT_CONE.length / 2


def test_density_matches_closed_form():
    # shooting vs complex-order cylinder functions, compared as densities
    for n, c in enumerate(find_eigenvalues(UNIT_CONE, 0, 3)):
        mode = eigenfunction(UNIT_CONE, 0, c)
        z = mode.z_grid
        ref = np.abs(closed_form_axial(UNIT_CONE, 0, c, z))**2 * mode.weight
        ref /= simpson(ref, x=z)
        assert np.max(np.abs(ref - mode.density())) < 1e-6 * ref.max()


def test_closed_form_residual_agrees_with_shooting_roots():
    for c in find_eigenvalues(UNIT_CONE, 0, 3):
        assert abs(bessel_cross_product_residual(UNIT_CONE, 0, c)) < 1e-9
    assert abs(bessel_cross_product_residual(UNIT_CONE, 0, 2.0)) > 1e-4


def test_eigenfunction_rejects_non_eigenvalue():
    with pytest.raises(ValueError, match="not an eigenvalue"):
        eigenfunction(UNIT_CONE, 0, 2.0)
    with pytest.raises(ValueError):
        eigenfunction(UNIT_CONE, 0, -1.0)


def test_mode_energy_bookkeeping():
    c1 = find_eigenvalues(UNIT_CONE, 0, 1)[0]
    mode = eigenfunction(UNIT_CONE, 0, c1, mass_ratio=0.067)
    assert mode.c_value == pytest.approx(c1)
    assert mode.omega_scaled == pytest.approx(c1 * c1, rel=1e-12)
    from conewave import constants
    assert mode.omega == pytest.approx(
        c1 * c1 * constants.kinetic_factor(0.067), rel=1e-12)


# ---------------------------------------------------------------------------
# finite-difference route
# ---------------------------------------------------------------------------

def test_fd_matches_shooting():
    shot = find_eigenvalues(UNIT_CONE, 0, 3)
    fd = fd_spectrum(UNIT_CONE, 0, 4000, 3)
    assert np.max(np.abs(shot - fd) / shot) < 1e-4


def test_fd_cylinder_limit():
    cyl = ConeGeometry(1.0, 1e-6, 1.5)
    fd = fd_spectrum(cyl, 0, 4000, 3)
    ref = cylinder_levels(1.5, 0, 3)
    assert np.max(np.abs(fd - ref) / np.array(ref)) < 1e-4


def test_fd_second_order_convergence():
    ref = find_eigenvalues(UNIT_CONE, 0, 1)[0]
    e1 = abs(fd_spectrum(UNIT_CONE, 0, 1000, 1)[0] - ref)
    e2 = abs(fd_spectrum(UNIT_CONE, 0, 2000, 1)[0] - ref)
    order = math.log2(e1 / e2)
    assert 1.8 < order < 2.2


def test_fd_validation():
    with pytest.raises(ValueError):
        fd_spectrum(UNIT_CONE, 0, 100, 1)     # too coarse
    cone = ConeGeometry(1.0, 0.1, 10.0)
    with pytest.raises(ValueError, match="negative"):
        fd_spectrum(cone, 0, 1000, 1)


# ---------------------------------------------------------------------------
# curvature-potential expectation
# ---------------------------------------------------------------------------

def test_gp_expectation_negative_and_independent_quadrature():
    c1 = find_eigenvalues(UNIT_CONE, 0, 1)[0]
    mode = eigenfunction(UNIT_CONE, 0, c1)
    val = gp_expectation(UNIT_CONE, mode, 1.0)
    assert val < 0

    # independent route: raw ODE solve + adaptive quadrature, no AxialMode
    slope, aspect = UNIT_CONE.slope, UNIT_CONE.aspect
    s = c1 * c1

    def rhs(z, y):
        u = 1 + slope * z
        return [y[1], -(slope / u) * y[1]
                - ((0.25 / u**2) + s * (1 + slope**2)) * y[0]]

    sol = solve_ivp(rhs, (0, aspect), [0.0, 1.0], method="DOP853",
                    rtol=1e-11, atol=1e-13, dense_output=True)
    w = lambda z: (1 + slope * z) * math.sqrt(1 + slope**2)
    dens = lambda z: sol.sol(z)[0]**2 * w(z)
    norm = quad(dens, 0, aspect, limit=200)[0]
    from conewave import constants
    u_of_z = lambda z: (-constants.HBAR2_OVER_2ME
                        / (4 * (1 + slope * z)**2 * (1 + slope**2)))
    ref = quad(lambda z: u_of_z(z) * dens(z), 0, aspect, limit=200)[0] / norm
    assert abs(val - ref) < 1e-6 * abs(ref)


def test_gaas_reference_shift():
    # frozen via an independent finite-difference + trapezoid route
    radius, mass = 10.0, 0.067
    cone = ConeGeometry(radius, 0.1, 2.0 * radius)
    c1 = find_eigenvalues(cone, 0, 1)[0]
    mode = eigenfunction(cone, 0, c1, mass_ratio=mass)
    gp = gp_expectation(cone, mode, mass)
    assert gp == pytest.approx(-1.16734, rel=1e-3)
    assert mode.omega == pytest.approx(12.71318, rel=1e-3)
    assert abs(gp) / mode.omega == pytest.approx(0.09182, rel=1e-2)


def test_gp_energy_fraction_nan_when_unbound():
    assert math.isnan(gp_energy_fraction(ConeGeometry(1.0, 0.1, 10.0)))


def test_mode_from_negative_energy():
    cone = ConeGeometry(1.0, 0.1, 10.0)
    s0 = find_surface_energies(cone, 0, 1)[0]
    mode = mode_from_energy(cone, 0, s0)
    assert math.isnan(mode.c_value)
    assert mode.omega < 0
    assert abs(simpson(mode.density(), x=mode.z_grid) - 1.0) < 1e-8
