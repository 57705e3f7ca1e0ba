"""Curvature and the induced potential on a few revolution surfaces.

A particle squeezed onto a curved wall feels U = -(hbar^2/2m)(M^2 - K),
which never turns repulsive.  This script walks through the stock profiles:
a cylinder (constant U), a cone (U fading with distance from the apex), a
sphere patch reconstructed from tabulated samples, and the cylinder-cone
junction whose parabolic caps dig sharp potential wells.

Run:  python demos/01_surface_geometry.py        (writes PNG + prints values)
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from conewave import (Cone, Cylinder, JunctionGeometry, TabulatedGeneratrix,
                      curvature_at, geometric_potential_at, junction_profile,
                      metric_at)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# --- a cylinder: curvature in one direction only, U = -hbar^2/(8 m R^2) ----
cyl = Cylinder(5.0)
u_cyl = geometric_potential_at(cyl, 0.0, mass_ratio=0.067).U
print(f"cylinder R=5 nm, GaAs mass:  U = {u_cyl:.4f} meV everywhere")

# --- a cone: metric and curvature grow milder away from the small rim ------
cone = Cone(1.0, 1.0)
for z in (0.0, 1.0, 2.0):
    m = metric_at(cone, z)
    c = curvature_at(cone, z)
    print(f"cone z={z:3.1f}:  sqrt(g) = {m.sqrt_g:6.3f} nm,  "
          f"M = {c.mean:6.4f} /nm,  K = {c.gauss:.1e} /nm^2")

# --- a sphere patch from samples: both curvatures, K > 0 -------------------
zs = np.linspace(-0.6, 0.6, 200)
sphere = TabulatedGeneratrix(zs, np.sqrt(1.0 - zs**2))
c = curvature_at(sphere, 0.0)
print(f"unit sphere patch (tabulated): M = {c.mean:.5f}, K = {c.gauss:.5f} "
      f"(both exactly 1 in the analytic limit)")

# --- the junction: the caps carry deep, asymmetric wells -------------------
junction = JunctionGeometry(r_in=40.0, r_out=2.0, half_length=10.0,
                            smooth_len=2.0)
z = np.linspace(-12.0, 12.0, 2001)
rho, rho_p, rho_pp = junction_profile(junction, z)
u = geometric_potential_at(junction, z, mass_ratio=0.173).U

fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
axes[0].plot(z, rho)
axes[0].set_ylabel("radius (nm)")
axes[0].set_title("cone-like junction between two cylinders")
axes[1].plot(z, u)
axes[1].set_xlabel("z (nm)")
axes[1].set_ylabel("U (meV)")
axes[1].set_title("curvature-induced potential (jumps at the cap edges)")
fig.tight_layout()
fig.savefig(OUT / "01_junction_potential.png", dpi=150)
print(f"deepest junction well: {u.min():.1f} meV at z = {z[np.argmin(u)]:.1f} "
      f"nm (the narrow-side cap); wrote {OUT / '01_junction_potential.png'}")
