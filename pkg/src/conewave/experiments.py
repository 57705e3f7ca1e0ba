"""Scripted, reproducible sweeps over the cone and junction configurations.

Each experiment id maps to a fixed default configuration, runs the solvers
over a parameter grid, writes delimited text tables ('#'-prefixed metadata
header, tab-separated columns with units in their names), and evaluates a
small block of embedded sanity anchors whose pass/fail result is part of
the returned summary.  Identical specs produce byte-identical outputs;
grid points may be dispatched to a process pool and are reassembled in
index order, so the worker count never changes the result.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple
import hashlib
import json
import math
import os

import numpy as np
from scipy.signal import find_peaks

from . import constants
from .geometry import Cone, JunctionGeometry, geometric_potential_at
from .spectrum import (ConeGeometry, eigenfunction, find_eigenvalues,
                       find_surface_energies, gp_expectation,
                       mode_from_energy)
from .transport import ScatterConfig, solve_scattering

_VERSION = "0.1.0"

EXPERIMENT_IDS = (
    "table1",
    "fig2_gp",
    "fig3_pd",
    "fig4a_levels_vs_lambda",
    "fig4b_ground_vs_height",
    "fig5_gaas",
    "fig6_T_vs_E",
    "fig7_T_vs_E_eps",
    "fig8_T_vs_R1",
)

DEFAULTS = {
    "table1": dict(slope=1.0, eta=0, aspects=(1.5, 4.0), count=3),
    "fig2_gp": dict(slope=1.0, aspect=1.5, points=301),
    "fig3_pd": dict(slope=1.0, eta=0, aspects=(1.5, 4.0), count=3,
                    points=2001),
    "fig4a_levels_vs_lambda": dict(slope_min=0.3, slope_max=2.0,
                                   slope_step=0.1, aspects=(2.5, 4.0),
                                   count=3, eta=0),
    "fig4b_ground_vs_height": dict(aspect_min=1.0, aspect_max=6.0,
                                   aspect_points=11,
                                   slopes=(0.3, 0.8, 1.5, 2.0), eta=0),
    "fig5_gaas": dict(radius_nm=10.0, mass_ratio=constants.GAAS_MASS_RATIO,
                      slope_min=0.1, slope_max=2.0, slope_points=40,
                      aspect_min=2.0, aspect_max=10.0, aspect_points=40,
                      contour_levels=(0.05, 0.01)),
    "fig6_T_vs_E": dict(r_in_values=(40.0, 20.0, 10.0), r_out=2.0,
                        half_length=10.0, smooth_len=2.0, e_min=0.1,
                        e_max=50.0, e_points=500,
                        mass_ratio=constants.JUNCTION_MASS_RATIO,
                        grid_points=4000),
    "fig7_T_vs_E_eps": dict(r_in=30.0, r_out=3.0, half_length=10.0,
                            smooth_lens=(2.0, 1.0, 0.5), e_min=0.1,
                            e_max=50.0, e_points=500,
                            mass_ratio=constants.JUNCTION_MASS_RATIO,
                            grid_points=4000),
    "fig8_T_vs_R1": dict(r_in_min=2.5, r_in_max=40.0, r_in_points=150,
                         half_lengths=(5.0, 10.0, 20.0), r_out=2.0,
                         smooth_len=2.0, energy=10.0,
                         mass_ratio=constants.JUNCTION_MASS_RATIO,
                         grid_points=4000),
}


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SweepSpec:
    """One experiment run: id, parameter overrides, output location."""

    experiment_id: str
    params: dict = field(default_factory=dict)
    output_dir: str = "."
    workers: int = 0     # 0 -> CONEWAVE_WORKERS env var, else serial

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment id {self.experiment_id!r}; "
                             f"known: {', '.join(EXPERIMENT_IDS)}")
        unknown = set(self.params) - set(DEFAULTS[self.experiment_id])
        if unknown:
            raise ValueError(
                f"unknown parameter(s) for {self.experiment_id}: "
                f"{', '.join(sorted(unknown))}")

    def resolved_params(self) -> dict:
        merged = dict(DEFAULTS[self.experiment_id])
        merged.update(self.params)
        return merged

    def digest(self) -> str:
        blob = json.dumps({"experiment_id": self.experiment_id,
                           "params": self.resolved_params()},
                          sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:10]


@dataclass(frozen=True)
class ExperimentResult:
    experiment_id: str
    digest: str
    files: tuple
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# ---------------------------------------------------------------------------
# Infrastructure
# ---------------------------------------------------------------------------

def _resolve_workers(workers: int) -> int:
    if workers > 0:
        return workers
    return max(1, int(os.environ.get("CONEWAVE_WORKERS", "1")))


def _pmap(fn, items, workers):
    """Order-stable map, optionally over a process pool."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _write_table(path: Path, meta: dict, colnames, rows) -> Path:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for key, val in meta.items():
            fh.write(f"# {key} = {val}\n")
        fh.write("\t".join(colnames) + "\n")
        np.savetxt(fh, rows, fmt="%.12g", delimiter="\t")
    return path


def _write_polylines(path: Path, meta: dict, polylines) -> Path:
    with open(path, "w", newline="\n") as fh:
        for key, val in meta.items():
            fh.write(f"# {key} = {val}\n")
        fh.write("x\ty\n")
        for i, poly in enumerate(polylines):
            if i:
                fh.write("\n")       # blank line separates polylines
            np.savetxt(fh, poly, fmt="%.12g", delimiter="\t")
    return path


def _base_meta(spec: SweepSpec) -> dict:
    p = spec.resolved_params()
    meta = {"experiment": spec.experiment_id, "code_version": _VERSION,
            "level_tolerance_dc": "1e-8", "ode_rtol": "1e-11"}
    for key in sorted(p):
        meta[key] = p[key]
    return meta


# ---------------------------------------------------------------------------
# Sweep metrics shared with the acceptance suite
# ---------------------------------------------------------------------------

def oscillation_amplitude(T) -> float:
    """max - min of a transmission curve over its scan window."""
    return float(np.nanmax(T) - np.nanmin(T))


def off_resonance_mean(T) -> float:
    """Mean transmission of the anti-resonant floor (interior local minima)."""
    T = np.asarray(T, dtype=float)
    idx, _ = find_peaks(-T)
    if idx.size == 0:
        return float(np.nanmean(T))
    return float(np.nanmean(T[idx]))


def resonance_peaks(x, T, prominence=0.02):
    """Positions and prominences of resonance peaks of T(x)."""
    idx, props = find_peaks(np.asarray(T, dtype=float), prominence=prominence)
    return np.asarray(x)[idx], props["prominences"]


def peak_shift_within_spacing(x, T_a, T_b, prominence=0.02) -> bool:
    """True if each peak of T_a moves by less than one inter-peak spacing
    when matched to its nearest peak of T_b."""
    pa, _ = resonance_peaks(x, T_a, prominence)
    pb, _ = resonance_peaks(x, T_b, prominence)
    if pa.size < 2 or pb.size == 0:
        return False
    spacing = np.diff(pa)
    for i, pos in enumerate(pa):
        local = spacing[min(i, spacing.size - 1)]
        if np.min(np.abs(pb - pos)) >= local:
            return False
    return True


def contour_extract(x, y, surface, level: float):
    """Marching-squares iso-lines of surface[i, j] = value at (x[i], y[j]).

    Returns a list of (k, 2) polyline arrays in data coordinates; empty if
    the level is outside the data range.  The surface must be finite.
    """
    from skimage import measure

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    surface = np.asarray(surface, dtype=float)
    if surface.shape != (x.size, y.size):
        raise ValueError("surface shape must be (len(x), len(y))")
    if not np.all(np.isfinite(surface)):
        raise ValueError("surface must be finite; fill gaps before contouring")
    out = []
    for poly in measure.find_contours(surface, level):
        px = np.interp(poly[:, 0], np.arange(x.size), x)
        py = np.interp(poly[:, 1], np.arange(y.size), y)
        out.append(np.column_stack([px, py]))
    return out


# ---------------------------------------------------------------------------
# Per-point workers (top-level so they can cross a process boundary)
# ---------------------------------------------------------------------------

def _levels_point(args):
    slope, aspect, eta, count = args
    cone = ConeGeometry(1.0, slope, aspect)
    return tuple(find_eigenvalues(cone, eta, count))


def _ground_point(args):
    slope, aspect, eta = args
    cone = ConeGeometry(1.0, slope, aspect)
    return find_eigenvalues(cone, eta, 1)[0]


def _gaas_point(args):
    slope, aspect, radius, mass_ratio = args
    cone = ConeGeometry(radius, slope, aspect * radius)
    s0 = find_surface_energies(cone, 0, 1)[0]
    mode = mode_from_energy(cone, 0, s0, mass_ratio=mass_ratio)
    gp = gp_expectation(cone, mode, mass_ratio)
    ratio = abs(gp) / mode.omega if mode.omega > 0 else math.nan
    return gp, mode.omega, ratio


def _transport_point(args):
    r_in, r_out, half_length, smooth_len, energy, mass_ratio, grid_points = args
    junction = JunctionGeometry(r_in, r_out, half_length, smooth_len)
    cfg = ScatterConfig(energy=energy, mass_ratio=mass_ratio,
                        grid_points=grid_points)
    return solve_scattering(junction, cfg).T


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

_TABLE1_ANCHORS = {1.5: (1.451, 2.946, 4.432), 4.0: (0.5233, 1.091, 1.652)}


def _run_table1(p, workers):
    rows, checks = [], []
    for aspect in p["aspects"]:
        cone = ConeGeometry(1.0, p["slope"], aspect)
        cs = find_eigenvalues(cone, p["eta"], p["count"])
        rows += [(aspect, n + 1, c) for n, c in enumerate(cs)]
        anchor = _TABLE1_ANCHORS.get(aspect)
        if anchor and p["slope"] == 1.0 and p["eta"] == 0 and p["count"] >= 3:
            err = max(abs(c - a) / a for c, a in zip(cs[:3], anchor))
            checks.append(Check(
                f"levels_aspect_{aspect:g}", err < 1e-3,
                f"max rel dev {err:.2e} from {anchor} (tol 1e-3)"))
    cols = ("zmax_over_rho", "level", "c_dimensionless")
    return [("", cols, rows)], checks


def _run_fig2_gp(p, workers):
    zeta = np.linspace(0.0, p["aspect"], p["points"])
    cone = Cone(1.0, p["slope"])
    u = geometric_potential_at(cone, zeta, mass_ratio=1.0).U \
        / constants.HBAR2_OVER_2ME       # units hbar^2/(2 m rho^2)
    rows = np.column_stack([zeta, u])
    checks = [
        Check("gp_at_small_rim",
              abs(u[0] + 1.0 / (4.0 * (1.0 + p["slope"]**2))) < 1e-12,
              f"U(0) = {u[0]:.6f} in hbar^2/(2 m rho^2) units"),
        Check("gp_attractive", bool(np.all(u <= 0)), "U <= 0 on the wall"),
    ]
    cols = ("z_over_rho", "U_hbar2_over_2m_rho2")
    return [("", cols, rows)], checks


def _run_fig3_pd(p, workers):
    tables, checks = [], []
    for aspect in p["aspects"]:
        cone = ConeGeometry(1.0, p["slope"], aspect)
        cs = find_eigenvalues(cone, p["eta"], p["count"])
        grid = np.linspace(0.0, aspect, p["points"])
        dens = []
        for n, c in enumerate(cs):
            mode = eigenfunction(cone, p["eta"], c, grid=grid)
            pd = mode.density()
            dens.append(pd)
            npeaks = len(find_peaks(pd)[0])
            checks.append(Check(
                f"aspect{aspect:g}_mode{n}_peaks", npeaks == n + 1,
                f"{npeaks} density peaks for mode {n} (expect {n + 1})"))
        peak_z = grid[np.argmax(dens[0])]
        checks.append(Check(
            f"aspect{aspect:g}_ground_leans_to_small_rim",
            peak_z < aspect / 2,
            f"ground density peak at z/rho = {peak_z:.3f} "
            f"(midpoint {aspect / 2:g})"))
        cols = ["z_over_rho"] + [f"pd_mode{n}" for n in range(len(cs))]
        tables.append((f"aspect{aspect:g}",
                       tuple(cols), np.column_stack([grid] + dens)))
    return tables, checks


def _run_fig4a(p, workers):
    slopes = np.arange(p["slope_min"], p["slope_max"] + p["slope_step"] / 2,
                       p["slope_step"])
    rows, checks = [], []
    for aspect in p["aspects"]:
        levels = np.array(_pmap(
            _levels_point,
            [(s, aspect, p["eta"], p["count"]) for s in slopes], workers))
        rows += [(aspect, s, *lv) for s, lv in zip(slopes, levels)]
        for k in range(p["count"]):
            mono = bool(np.all(np.diff(levels[:, k]) < 0))
            checks.append(Check(
                f"aspect{aspect:g}_c{k + 1}_decreasing_in_slope", mono,
                f"c_{k + 1} from {levels[0, k]:.4f} to {levels[-1, k]:.4f}"))
        gaps = np.diff(levels, axis=1)
        checks.append(Check(
            f"aspect{aspect:g}_level_gaps_decreasing_in_slope",
            bool(np.all(np.diff(gaps, axis=0) < 0)),
            "c_(n+1)-c_n shrinks as the slope grows"))
    cols = ("zmax_over_rho", "slope",
            *[f"c{k + 1}_dimensionless" for k in range(p["count"])])
    return [("", cols, rows)], checks


def _run_fig4b(p, workers):
    aspects = np.linspace(p["aspect_min"], p["aspect_max"],
                          p["aspect_points"])
    rows, checks = [], []
    for slope in p["slopes"]:
        c1 = np.array(_pmap(_ground_point,
                            [(slope, a, p["eta"]) for a in aspects], workers))
        rows += [(slope, a, c) for a, c in zip(aspects, c1)]
        checks.append(Check(
            f"slope{slope:g}_ground_decreasing_in_height",
            bool(np.all(np.diff(c1) < 0)),
            f"c_1 from {c1[0]:.4f} to {c1[-1]:.4f}"))
    cols = ("slope", "zmax_over_rho", "c1_dimensionless")
    return [("", cols, rows)], checks


def _run_fig5_gaas(p, workers):
    slopes = np.linspace(p["slope_min"], p["slope_max"], p["slope_points"])
    aspects = np.linspace(p["aspect_min"], p["aspect_max"],
                          p["aspect_points"])
    args = [(s, a, p["radius_nm"], p["mass_ratio"])
            for s in slopes for a in aspects]
    flat = _pmap(_gaas_point, args, workers)
    gp = np.array([f[0] for f in flat]).reshape(len(slopes), len(aspects))
    om = np.array([f[1] for f in flat]).reshape(len(slopes), len(aspects))
    ratio = np.array([f[2] for f in flat]).reshape(len(slopes), len(aspects))
    rows = [(s, a, gp[i, j], om[i, j], ratio[i, j])
            for i, s in enumerate(slopes) for j, a in enumerate(aspects)]
    cols = ("slope", "zmax_over_rho", "gp_expectation_meV",
            "ground_energy_meV", "gp_fraction")
    tables = [("", cols, rows)]

    # contours of the GP fraction; undefined (omega<=0) corners filled high
    filled = ratio.copy()
    bad = ~np.isfinite(filled)
    if bad.any():
        filled[bad] = 2.0 * np.nanmax(np.abs(ratio))
    contour_tables = []
    for level in p["contour_levels"]:
        polys = contour_extract(slopes, aspects, filled, level)
        contour_tables.append((f"contour{level:g}", polys))

    checks = []
    i0 = int(np.argmin(np.abs(slopes - 0.1)))
    j0 = int(np.argmin(np.abs(aspects - 2.0)))
    if abs(slopes[i0] - 0.1) < 1e-9 and abs(aspects[j0] - 2.0) < 1e-9:
        checks.append(Check(
            "gp_fraction_anchor", bool(0.07 <= ratio[i0, j0] <= 0.13),
            f"|<U>|/omega = {ratio[i0, j0]:.4f} at slope 0.1, height 2 "
            f"(expect 0.10 +- 0.03)"))
    col = ratio[:, j0]
    checks.append(Check(
        "gp_fraction_decreasing_in_slope",
        bool(np.all(np.diff(col) < 0)),
        f"fraction falls from {col[0]:.4f} to {col[-1]:.4f} along "
        f"height {aspects[j0]:g}"))
    checks.append(Check(
        "gp_expectation_negative",
        bool(np.all(gp < 0)),
        f"max <U> = {gp.max():.4f} meV"))
    nlines = {lvl: len(polys) for (lbl, polys), lvl
              in zip(contour_tables, p["contour_levels"])}
    checks.append(Check(
        "top_contour_exists", len(contour_tables[0][1]) > 0,
        f"polylines per level: {nlines}"))
    return tables, checks, contour_tables


def _sweep_energy_curves(p, workers, junction_params):
    energies = np.linspace(p["e_min"], p["e_max"], p["e_points"])
    curves = []
    for jp in junction_params:
        args = [(jp[0], jp[1], jp[2], jp[3], e, p["mass_ratio"],
                 p["grid_points"]) for e in energies]
        curves.append(np.array(_pmap(_transport_point, args, workers)))
    return energies, curves


def _run_fig6(p, workers):
    jps = [(r1, p["r_out"], p["half_length"], p["smooth_len"])
           for r1 in p["r_in_values"]]
    energies, curves = _sweep_energy_curves(p, workers, jps)
    cols = ("E_l_meV",
            *[f"T_rin_{r1:g}nm" for r1 in p["r_in_values"]])
    rows = np.column_stack([energies] + curves)
    amps = [oscillation_amplitude(T) for T in curves]
    floors = [off_resonance_mean(T) for T in curves]
    order = np.argsort(p["r_in_values"])[::-1]      # widest first
    checks = [
        Check("amplitude_grows_with_radius_ratio",
              bool(np.all(np.diff([amps[i] for i in order]) < 0)),
              f"amplitudes {dict(zip(p['r_in_values'], np.round(amps, 4)))}"),
        Check("off_resonance_floor_grows_as_ratio_shrinks",
              bool(np.all(np.diff([floors[i] for i in order]) > 0)),
              f"floors {dict(zip(p['r_in_values'], np.round(floors, 4)))}"),
        Check("unitarity_bound",
              bool(np.all(np.concatenate(curves) <= 1 + 1e-6)),
              f"max T = {max(np.max(T) for T in curves):.8f}"),
        Check("several_resonances_widest",
              len(resonance_peaks(energies, curves[0])[0]) >= 5,
              f"{len(resonance_peaks(energies, curves[0])[0])} peaks "
              f"for r_in = {p['r_in_values'][0]:g} nm"),
    ]
    return [("", cols, rows)], checks


def _run_fig7(p, workers):
    jps = [(p["r_in"], p["r_out"], p["half_length"], eps)
           for eps in p["smooth_lens"]]
    energies, curves = _sweep_energy_curves(p, workers, jps)
    cols = ("E_l_meV", *[f"T_eps_{e:g}nm" for e in p["smooth_lens"]])
    rows = np.column_stack([energies] + curves)
    amps = [oscillation_amplitude(T) for T in curves]
    order = np.argsort(p["smooth_lens"])[::-1]      # smoothest first
    shift_ok = all(
        peak_shift_within_spacing(energies, curves[i], curves[j])
        for i, j in zip(order[:-1], order[1:]))
    checks = [
        Check("amplitude_grows_as_transition_sharpens",
              bool(np.all(np.diff([amps[i] for i in order]) > 0)),
              f"amplitudes {dict(zip(p['smooth_lens'], np.round(amps, 4)))}"),
        Check("peak_positions_shift_little", shift_ok,
              "every resonance moves by less than one inter-peak spacing"),
        Check("unitarity_bound",
              bool(np.all(np.concatenate(curves) <= 1 + 1e-6)),
              f"max T = {max(np.max(T) for T in curves):.8f}"),
    ]
    return [("", cols, rows)], checks


def _run_fig8(p, workers):
    radii = np.linspace(p["r_in_min"], p["r_in_max"], p["r_in_points"])
    curves, proms = [], {}
    for a in p["half_lengths"]:
        args = [(r1, p["r_out"], a, p["smooth_len"], p["energy"],
                 p["mass_ratio"], p["grid_points"]) for r1 in radii]
        T = np.array(_pmap(_transport_point, args, workers))
        curves.append(T)
        _, pr = resonance_peaks(radii, T, prominence=0.005)
        proms[a] = pr.max() if pr.size else 0.0
    cols = ("r_in_nm", *[f"T_a_{a:g}nm" for a in p["half_lengths"]])
    rows = np.column_stack([radii] + curves)
    half = len(radii) // 2
    amp_growth = all(
        oscillation_amplitude(T[half:]) > oscillation_amplitude(T[:half])
        for T in curves)
    a_min, a_max = min(p["half_lengths"]), max(p["half_lengths"])
    checks = [
        Check("amplitude_grows_with_inlet_radius", bool(amp_growth),
              "upper-half oscillation beats lower-half for every length"),
        Check("peaks_less_pronounced_for_longer_junction",
              proms[a_max] < proms[a_min],
              f"max prominence {proms[a_max]:.4f} (a={a_max:g}) < "
              f"{proms[a_min]:.4f} (a={a_min:g})"),
        Check("unitarity_bound",
              bool(np.all(np.concatenate(curves) <= 1 + 1e-6)),
              f"max T = {max(np.max(T) for T in curves):.8f}"),
    ]
    return [("", cols, rows)], checks


_RUNNERS = {
    "table1": _run_table1,
    "fig2_gp": _run_fig2_gp,
    "fig3_pd": _run_fig3_pd,
    "fig4a_levels_vs_lambda": _run_fig4a,
    "fig4b_ground_vs_height": _run_fig4b,
    "fig5_gaas": _run_fig5_gaas,
    "fig6_T_vs_E": _run_fig6,
    "fig7_T_vs_E_eps": _run_fig7,
    "fig8_T_vs_R1": _run_fig8,
}


def run_experiment(spec: SweepSpec) -> ExperimentResult:
    """Run one experiment: write its tables and return the check summary."""
    params = spec.resolved_params()
    workers = _resolve_workers(spec.workers)
    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = spec.digest()
    meta = _base_meta(spec)

    result = _RUNNERS[spec.experiment_id](params, workers)
    tables, checks = result[0], result[1]
    contour_tables = result[2] if len(result) > 2 else []

    files = []
    stem = f"{spec.experiment_id}_{digest}"
    for label, cols, rows in tables:
        name = f"{stem}_{label}.tsv" if label else f"{stem}.tsv"
        files.append(_write_table(out_dir / name, meta, cols, rows))
    for label, polys in contour_tables:
        files.append(_write_polylines(out_dir / f"{stem}_{label}.tsv",
                                      meta, polys))

    summary = {
        "experiment_id": spec.experiment_id,
        "digest": digest,
        "params": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in params.items()},
        "code_version": _VERSION,
        "files": [f.name for f in files],
        "checks": [{"name": c.name, "passed": bool(c.passed),
                    "detail": c.detail} for c in checks],
        "passed": bool(all(c.passed for c in checks)),
    }
    summary_path = out_dir / f"{stem}_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True)
                            + "\n")
    files.append(summary_path)
    return ExperimentResult(spec.experiment_id, digest, tuple(files),
                            tuple(checks))
