"""Command-line front end.

Subcommands: ``geometry``, ``bound-states``, ``transport``, ``experiment``,
``verify``.  Parameters come from flags or from an INI-style config file
(``key = value`` lines under a ``[subcommand]`` section); flags override
the file.  Lengths are nm and energies meV at this boundary, except under
``--dimensionless`` where bound-state energies are reported in units of
hbar^2/(2 m rho^2).

Exit codes: 0 success, 1 acceptance/solver failure, 2 usage error.
"""

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, constants
from .experiments import EXPERIMENT_IDS, SweepSpec, run_experiment
from .geometry import (Cone, Cylinder, JunctionGeometry, curvature_at,
                       geometric_potential_at, metric_at)
from .spectrum import ConeGeometry, find_eigenvalues
from .transport import ScatterConfig, transmission_vs_energy

USAGE_ERROR, FAILURE, OK = 2, 1, 0


def _parse_bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# config-file keys per section: name -> (converter, required)
_CONFIG_KEYS = {
    "geometry": {
        "kind": (str, True), "rho": (float, False), "lambda": (float, False),
        "R": (float, False), "R1": (float, False), "R2": (float, False),
        "a": (float, False), "eps": (float, False), "zmin": (float, False),
        "zmax": (float, False), "points": (int, False),
        "mass_ratio": (float, False), "out": (str, False),
    },
    "bound-states": {
        "rho": (float, True), "lambda": (float, True), "zmax": (float, True),
        "eta": (int, False), "count": (int, False),
        "mass_ratio": (float, False), "dimensionless": (_parse_bool, False),
        "out": (str, False),
    },
    "transport": {
        "R1": (float, True), "R2": (float, True), "a": (float, True),
        "eps": (float, True), "Emin": (float, True), "Emax": (float, True),
        "points": (int, False), "mode": (int, False),
        "mass_ratio": (float, False), "grid_points": (int, False),
        "out": (str, False),
    },
    "experiment": {
        "id": (str, True), "out": (str, False), "workers": (int, False),
    },
    "verify": {
        "only": (str, False), "report": (str, False),
        "transport_grid_points": (int, False), "out": (str, False),
    },
}


class UsageError(ValueError):
    pass


def _apply_config_file(args, subcommand):
    """Fill unset parameters from the config file; flags win."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str              # keys are case-sensitive (R1, Emin)
    path = Path(args.config)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise UsageError(f"config file {path}: {exc}") from exc
    if not parser.has_section(subcommand):
        return
    allowed = _CONFIG_KEYS[subcommand]
    for key, raw in parser.items(subcommand):
        if key not in allowed:
            raise UsageError(
                f"config file {path}, section [{subcommand}]: "
                f"unknown key {key!r}")
        convert, _ = allowed[key]
        dest = key.replace("lambda", "slope") if key == "lambda" else key
        if getattr(args, dest, None) is None:
            try:
                setattr(args, dest, convert(raw))
            except ValueError as exc:
                raise UsageError(
                    f"config file {path}, section [{subcommand}], "
                    f"key {key!r}: {exc}") from exc


def _require(args, subcommand, names):
    missing = [n for n in names if getattr(
        args, n.replace("lambda", "slope") if n == "lambda" else n) is None]
    if missing:
        raise UsageError(
            f"{subcommand}: missing required parameter(s): "
            + ", ".join("--" + m for m in missing))


def _print_table(colnames, rows, out=None):
    lines = ["\t".join(colnames)]
    for row in np.atleast_2d(rows):
        lines.append("\t".join(f"{v:.10g}" for v in row))
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_geometry(args):
    if args.kind == "cone":
        _require(args, "geometry", ["rho", "lambda"])
        gen = Cone(args.rho, args.slope)
        zmin = 0.0 if args.zmin is None else args.zmin
        zmax = 2.0 * args.rho if args.zmax is None else args.zmax
    elif args.kind == "cylinder":
        _require(args, "geometry", ["R"])
        gen = Cylinder(args.R)
        zmin = 0.0 if args.zmin is None else args.zmin
        zmax = 2.0 * args.R if args.zmax is None else args.zmax
    elif args.kind == "junction":
        _require(args, "geometry", ["R1", "R2", "a", "eps"])
        gen = JunctionGeometry(args.R1, args.R2, args.a, args.eps)
        zmin = -args.a if args.zmin is None else args.zmin
        zmax = args.a if args.zmax is None else args.zmax
    else:
        raise UsageError(f"unknown generatrix kind {args.kind!r}")
    mass = args.mass_ratio if args.mass_ratio is not None else 1.0
    z = np.linspace(zmin, zmax, args.points or 101)
    met = metric_at(gen, z)
    cur = curvature_at(gen, z)
    pot = geometric_potential_at(gen, z, mass)
    cols = ("z_nm", "g_thth_nm2", "g_zz", "sqrt_g_nm",
            "mean_curv_per_nm", "gauss_curv_per_nm2", "U_meV")
    rows = np.column_stack([z, met.g_theta_theta, met.g_zz, met.sqrt_g,
                            cur.mean, cur.gauss, pot.U])
    _print_table(cols, rows, args.out)
    return OK


def _cmd_bound_states(args):
    eta = args.eta if args.eta is not None else 0
    count = args.count if args.count is not None else 3
    mass = args.mass_ratio if args.mass_ratio is not None \
        else constants.GAAS_MASS_RATIO
    cone = ConeGeometry(args.rho, args.slope, args.zmax)
    cs = find_eigenvalues(cone, eta, count)
    if args.dimensionless:
        cols = ("level", "c_dimensionless", "omega_hbar2_over_2m_rho2")
        rows = [(n + 1, c, c * c) for n, c in enumerate(cs)]
    else:
        scale = constants.kinetic_factor(mass) / args.rho**2
        cols = ("level", "c_dimensionless", "omega_meV")
        rows = [(n + 1, c, c * c * scale) for n, c in enumerate(cs)]
    _print_table(cols, rows, args.out)
    return OK


def _cmd_transport(args):
    points = args.points if args.points is not None else 500
    junction = JunctionGeometry(args.R1, args.R2, args.a, args.eps)
    config = ScatterConfig(
        energy=max(args.Emin, 1e-6),
        mass_ratio=(args.mass_ratio if args.mass_ratio is not None
                    else constants.JUNCTION_MASS_RATIO),
        mode=args.mode if args.mode is not None else 0,
        grid_points=(args.grid_points if args.grid_points is not None
                     else 4000))
    energies = np.linspace(args.Emin, args.Emax, points)
    sweep = transmission_vs_energy(junction, energies, config)
    for idx, msg in sweep.failures:
        print(f"point {idx} failed: {msg}", file=sys.stderr)
    _print_table(("E_l_meV", "T", "R"),
                 np.column_stack([sweep.x, sweep.T, sweep.R_coeff]), args.out)
    return FAILURE if sweep.failures else OK


def _cmd_experiment(args):
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        overrides[key.strip()] = tuple(val) if isinstance(val, list) else val
    spec = SweepSpec(experiment_id=args.id, params=overrides,
                     output_dir=args.out or ".",
                     workers=args.workers or 0)
    result = run_experiment(spec)
    for check in result.checks:
        tag = "PASS" if check.passed else "FAIL"
        print(f"[{tag}] {result.experiment_id}:{check.name}: {check.detail}")
    for path in result.files:
        print(f"wrote {path}")
    return OK if result.passed else FAILURE


def _cmd_verify(args):
    names = args.only or None
    cfg = acceptance.AcceptanceConfig(
        transport_grid_points=(args.transport_grid_points
                               if args.transport_grid_points is not None
                               else 4000))
    try:
        results = acceptance.run(names, cfg, report=print)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    if args.report:
        payload = [{"name": r.name, "passed": r.passed, "detail": r.detail,
                    "seconds": round(r.seconds, 3)} for r in results]
        Path(args.report).write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote {args.report}")
    return OK if n_fail == 0 else FAILURE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conewave",
        description="Quantum mechanics on surfaces of revolution: curvature "
                    "potentials, truncated-cone bound states, junction "
                    "transmission.")
    parser.add_argument("--config", help="INI config file; flags override it")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("geometry",
                       help="metric, curvature and potential along a profile")
    p.add_argument("--kind", choices=("cone", "cylinder", "junction"))
    p.add_argument("--rho", type=float, help="cone rim radius, nm")
    p.add_argument("--lambda", dest="slope", type=float,
                   help="cone generatrix slope")
    p.add_argument("--R", type=float, help="cylinder radius, nm")
    p.add_argument("--R1", type=float, help="inlet radius, nm")
    p.add_argument("--R2", type=float, help="outlet radius, nm")
    p.add_argument("--a", type=float, help="junction half length, nm")
    p.add_argument("--eps", type=float, help="smooth transition length, nm")
    p.add_argument("--zmin", type=float)
    p.add_argument("--zmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--mass-ratio", dest="mass_ratio", type=float)
    p.add_argument("--out")

    p = sub.add_parser("bound-states", help="levels of the truncated cone")
    p.add_argument("--rho", type=float, help="small rim radius, nm")
    p.add_argument("--lambda", dest="slope", type=float,
                   help="generatrix slope tan(beta)")
    p.add_argument("--zmax", type=float, help="wall separation, nm")
    p.add_argument("--eta", type=int, help="azimuthal quantum number")
    p.add_argument("--count", type=int, help="number of levels")
    p.add_argument("--mass-ratio", dest="mass_ratio", type=float,
                   help=f"m/m_e (default {constants.GAAS_MASS_RATIO})")
    p.add_argument("--dimensionless", action="store_true", default=None,
                   help="report energies in hbar^2/(2 m rho^2) units")
    p.add_argument("--out")

    p = sub.add_parser("transport", help="junction transmission sweep")
    p.add_argument("--R1", type=float, help="inlet radius, nm")
    p.add_argument("--R2", type=float, help="outlet radius, nm")
    p.add_argument("--a", type=float, help="half length, nm")
    p.add_argument("--eps", type=float, help="smooth transition length, nm")
    p.add_argument("--Emin", type=float, help="lowest injection energy, meV")
    p.add_argument("--Emax", type=float, help="highest injection energy, meV")
    p.add_argument("--points", type=int, help="number of energies")
    p.add_argument("--mode", type=int, help="transverse mode n")
    p.add_argument("--mass-ratio", dest="mass_ratio", type=float,
                   help=f"m/m_e (default {constants.JUNCTION_MASS_RATIO})")
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--out")

    p = sub.add_parser("experiment", help="run a packaged sweep")
    p.add_argument("id", nargs="?", choices=EXPERIMENT_IDS)
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a default parameter (repeatable)")

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--only", action="append",
                   metavar="|".join(acceptance.CRITERION_NAMES[:2]) + "|...",
                   help="run only the named criteria (repeatable)")
    p.add_argument("--report", help="write a JSON report here")
    p.add_argument("--transport-grid-points", dest="transport_grid_points",
                   type=int, help="override the transport grid (contract: 4000)")
    p.add_argument("--list", action="store_true",
                   help="list criterion names and exit")
    return parser


_HANDLERS = {
    "geometry": _cmd_geometry,
    "bound-states": _cmd_bound_states,
    "transport": _cmd_transport,
    "experiment": _cmd_experiment,
    "verify": _cmd_verify,
}

_REQUIRED = {
    "geometry": ["kind"],
    "bound-states": ["rho", "lambda", "zmax"],
    "transport": ["R1", "R2", "a", "eps", "Emin", "Emax"],
    "experiment": ["id"],
    "verify": [],
}


def parse_config(argv=None) -> argparse.Namespace:
    """Validated run configuration from flags and the optional config file.

    Flags override file values; unknown keys, type mismatches and missing
    required keys raise UsageError naming the offender.
    """
    args = build_parser().parse_args(argv)
    if args.config:
        _apply_config_file(args, args.subcommand)
    if not (args.subcommand == "verify" and getattr(args, "list", False)):
        _require(args, args.subcommand, _REQUIRED[args.subcommand])
    return args


def main(argv=None) -> int:
    try:
        args = parse_config(argv)
        if args.subcommand == "verify" and getattr(args, "list", False):
            for name in acceptance.CRITERION_NAMES:
                print(name)
            return OK
        return _HANDLERS[args.subcommand](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RuntimeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
