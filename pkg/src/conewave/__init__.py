"""Quantum mechanics of a particle confined to a surface of revolution.

Squeezing a carrier onto a curved wall adds an attractive potential set
entirely by the wall's mean and Gaussian curvature.  This package evaluates
that potential for arbitrary revolution profiles, solves the bound states
of a truncated-cone wall between hard rims (with finite-difference and
closed-form cross-checks), and computes coherent transmission through a
cone-like junction between two cylinders with open transmitting boundaries.
"""

__version__ = "0.1.0"

from .constants import GAAS_MASS_RATIO, HBAR2_OVER_2ME, JUNCTION_MASS_RATIO
from .geometry import (Cone, Cylinder, GeometricPotentialSample,
                       JunctionGeometry, MetricSample, CurvatureSample,
                       TabulatedGeneratrix, curvature_at, curvature_invariant,
                       geometric_potential_at, junction_profile, metric_at)
from .spectrum import (AxialMode, ChannelIndex, ConeGeometry, axial_residual,
                       bessel_cross_product_residual, bessel_order,
                       eigenfunction, fd_spectrum, fd_surface_energies,
                       find_eigenvalues, find_surface_energies,
                       gp_energy_fraction, gp_expectation, mode_from_energy)
from .transport import (LeadWavenumbers, ScatterConfig, ScatteringSolution,
                        SweepResult, lead_wavenumbers, solve_scattering,
                        total_energy, transmission_vs_energy,
                        transmission_vs_inlet_radius)
from .experiments import (EXPERIMENT_IDS, ExperimentResult, SweepSpec,
                          contour_extract, run_experiment)

__all__ = [
    "AxialMode", "ChannelIndex", "Cone", "ConeGeometry", "CurvatureSample",
    "Cylinder", "EXPERIMENT_IDS", "ExperimentResult",
    "GAAS_MASS_RATIO", "GeometricPotentialSample", "HBAR2_OVER_2ME",
    "JUNCTION_MASS_RATIO", "JunctionGeometry", "LeadWavenumbers",
    "MetricSample", "ScatterConfig", "ScatteringSolution", "SweepResult",
    "SweepSpec", "TabulatedGeneratrix", "axial_residual",
    "bessel_cross_product_residual", "bessel_order", "contour_extract",
    "curvature_at", "curvature_invariant", "eigenfunction", "fd_spectrum",
    "fd_surface_energies", "find_eigenvalues", "find_surface_energies",
    "geometric_potential_at", "gp_energy_fraction", "gp_expectation",
    "junction_profile", "lead_wavenumbers", "metric_at", "mode_from_energy",
    "run_experiment", "solve_scattering", "total_energy",
    "transmission_vs_energy", "transmission_vs_inlet_radius",
]
