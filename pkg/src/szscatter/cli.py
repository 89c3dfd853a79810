"""Command-line front end.

    szscatter compute   --config sweep.yaml
    szscatter bounds    --potential sech2 --param V_e=0.1 --emin 0.2 --emax 4 --count 8
    szscatter approx    --config sweep.yaml
    szscatter catalog   list | eval NAME --param k=v --energy E [E ...]
    szscatter parametric --config oscillator.yaml
    szscatter verify    [--tighten 10] [--seed 0]
    szscatter trace     --config sweep.yaml --energy 1.5

Sweeps run on SZSCATTER_WORKERS processes (default 1); rows are written in
input order. Floats are written with repr so output is bit-stable. Errors exit
with status 2 and print one ``error code=... message=... key=value`` line on
stderr; a failing ``verify`` exits with status 1.

CSV columns
-----------
compute:    E, abs_alpha, abs_beta, T, R, conservation_residual, error_estimate
bounds:     E, family, theta, alpha_cap, beta_cap, T_floor, R_cap, T_numeric,
            R_numeric, margin, flag, validity
approx:     E, abs_beta_born, abs_beta_dborn, abs_beta_ab, abs_beta_ode
catalog:    E, T_exact, R_exact, T_printed
parametric: case, theta, alpha_cap, beta_cap, T_floor, R_cap, abs_alpha,
            abs_beta, particle_number, flag, validity
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import bounds as _bounds
from . import catalog, config, parametric, verify
from .approximations import above_barrier_beta, born_beta, distorted_born_beta
from .engine import PhaseVariant, Tolerances, integrate, write_trace
from .errors import ConfigError, NoPropagatingMode, ScatteringError

WORKERS_ENV = "SZSCATTER_WORKERS"
SATURATION_TOL = 1e-6
MARGIN_SLACK = 1e-9

COLUMNS = {
    "compute": ["E", "abs_alpha", "abs_beta", "T", "R", "conservation_residual",
                "error_estimate"],
    "bounds": ["E", "family", "theta", "alpha_cap", "beta_cap", "T_floor", "R_cap",
               "T_numeric", "R_numeric", "margin", "flag", "validity"],
    "approx": ["E", "abs_beta_born", "abs_beta_dborn", "abs_beta_ab", "abs_beta_ode"],
    "catalog": ["E", "T_exact", "R_exact", "T_printed"],
    "parametric": ["case", "theta", "alpha_cap", "beta_cap", "T_floor", "R_cap", "abs_alpha",
                   "abs_beta", "particle_number", "flag", "validity"],
}

_POT_CACHE = {}


def _potential(spec: config.PotentialSpec):
    key = repr(spec)
    if key not in _POT_CACHE:
        _POT_CACHE[key] = config.build_potential(spec)
    return _POT_CACHE[key]


# --- row builders (module level so worker processes can pickle them) --------

def _variant(spec, pot):
    if spec.phase is PhaseVariant.CONSTANT_K and not pot.symmetric_asymptotes:
        return PhaseVariant.WKB
    return spec.phase


def compute_rows(spec: config.SweepSpec, E):
    pot = _potential(spec.potential)
    r = integrate(pot, spec.units, E, _variant(spec, pot), spec.tolerances)
    return [{"E": E, "abs_alpha": abs(r.alpha), "abs_beta": abs(r.beta), "T": r.T, "R": r.R,
             "conservation_residual": r.conservation_residual,
             "error_estimate": r.error_estimate}]


def _flag(margin, validity):
    if validity == "vacuous":
        return "vacuous"
    if margin < -MARGIN_SLACK:
        return "violated"
    return "saturated" if abs(margin) <= SATURATION_TOL else "ok"


def bounds_rows(spec: config.SweepSpec, E):
    pot = _potential(spec.potential)
    r = integrate(pot, spec.units, E, _variant(spec, pot), spec.tolerances)
    reports = {rep.family: rep for rep in _bounds.admissible_bounds(pot, spec.units, E)}
    wanted = spec.families or tuple(reports)
    rows = []
    for fam in wanted:
        rep = reports.get(fam)
        if rep is None:
            nan = math.nan
            rows.append({"E": E, "family": fam, "theta": nan, "alpha_cap": nan, "beta_cap": nan,
                         "T_floor": nan, "R_cap": nan, "T_numeric": r.T, "R_numeric": r.R,
                         "margin": nan, "flag": "inadmissible", "validity": "inadmissible"})
            continue
        margin = r.T - rep.T_floor
        rows.append({"E": E, "family": rep.family, "theta": rep.theta_integral,
                     "alpha_cap": rep.alpha_cap, "beta_cap": rep.beta_cap,
                     "T_floor": rep.T_floor, "R_cap": rep.R_cap, "T_numeric": r.T,
                     "R_numeric": r.R, "margin": margin,
                     "flag": _flag(margin, rep.validity), "validity": rep.validity})
    return rows


def approx_rows(spec: config.SweepSpec, E):
    pot = _potential(spec.potential)
    r = integrate(pot, spec.units, E, _variant(spec, pot), spec.tolerances)
    row = {"E": E, "abs_beta_ode": abs(r.beta)}
    for key, fn in (("abs_beta_born", born_beta), ("abs_beta_dborn", distorted_born_beta),
                    ("abs_beta_ab", above_barrier_beta)):
        try:
            row[key] = fn(pot, spec.units, E).magnitude
        except ScatteringError:
            # estimate not defined here (turning point, spikes, asymmetric tails)
            row[key] = math.nan
    return [row]


ROW_BUILDERS = {"compute": compute_rows, "bounds": bounds_rows, "approx": approx_rows}


def _job(args):
    name, spec, E = args
    return ROW_BUILDERS[name](spec, E)


def workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("worker count must be an integer", variable=WORKERS_ENV, value=raw) \
            from None
    return max(1, n)


def sweep(name, spec: config.SweepSpec):
    """Rows for every energy, in input order."""
    if spec.energies is None:
        raise ConfigError("no energies given; use an energies section or --emin")
    energies = [float(E) for E in spec.energies.values()]
    if spec.potential.kind != "frequency":
        pot = _potential(spec.potential)
        floor = max(pot.v_minus_inf, pot.v_plus_inf)
        low = [E for E in energies if E <= floor]
        if low:
            raise NoPropagatingMode("energy does not exceed the asymptotic potential",
                                    E=low[0], v_asymptote=floor)
    jobs = [(name, spec, E) for E in energies]
    n = workers()
    if n == 1 or len(jobs) == 1:
        chunks = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            chunks = list(pool.map(_job, jobs))
    return [row for chunk in chunks for row in chunk]


# --- output -----------------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def write_rows(rows, columns, fmt, stream):
    if fmt == "json":
        clean = [{c: (r[c] if not isinstance(r[c], float) else
                      float(r[c]) if math.isfinite(r[c]) else None)
                  for c in columns} for r in rows]
        stream.write(json.dumps(clean, indent=1) + "\n")
        return
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])


def _open_output(path):
    if path in (None, "-"):
        if hasattr(sys.stdout, "reconfigure"):
            sys.stdout.reconfigure(encoding="utf-8", newline="\n")
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit(args, rows, columns, fmt):
    stream, close = _open_output(args.output)
    try:
        write_rows(rows, columns, fmt, stream)
    finally:
        if close:
            stream.close()


# --- argument handling --------------------------------------------------------

def _parse_params(pairs):
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError("parameters must look like key=value", got=item)
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError("parameter value is not a number", key=key, value=value) from None
    return out


def _spec_from_args(args) -> config.SweepSpec:
    if args.config:
        spec = config.load(args.config)
    elif args.potential:
        spec = config.SweepSpec(potential=config.PotentialSpec(kind=args.potential))
    else:
        raise ConfigError("give --config or --potential")
    pot = spec.potential
    if args.potential and args.config:
        pot = config.PotentialSpec(kind=args.potential)
    if args.param:
        pot = replace(pot, params={**pot.params, **_parse_params(args.param)})
    tol = spec.tolerances
    if args.rtol is not None or args.atol is not None:
        tol = Tolerances(args.rtol or tol.rtol, args.atol or tol.atol, tol.max_step,
                         tol.max_residual, tol.method)
    families = tuple(args.family) if args.family else None
    return spec.with_overrides(
        potential=pot, tolerances=tol, families=families, seed=args.seed,
        format=args.format, phase=PhaseVariant(args.phase) if args.phase else None,
        min=args.emin, max=args.emax, count=args.count, spacing=args.spacing)


def _add_sweep_args(p):
    p.add_argument("--config", help="YAML or JSON sweep file")
    p.add_argument("--potential", help="catalog name (overrides the file)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="potential parameter")
    p.add_argument("--emin", type=float)
    p.add_argument("--emax", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--spacing", choices=config.SPACINGS)
    p.add_argument("--family", action="append", help="bound family (repeatable)")
    p.add_argument("--phase", choices=[v.value for v in PhaseVariant])
    p.add_argument("--format", choices=config.FORMATS)
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", "-o", help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="szscatter", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("compute", "alpha, beta, T, R over an energy grid"),
                        ("bounds", "bound reports joined with numerical T"),
                        ("approx", "Born, distorted Born and above-barrier |beta|"),
                        ("parametric", "bounds and particle number for a frequency profile")):
        _add_sweep_args(sub.add_parser(name, help=help_))
    t = sub.add_parser("trace", help="per-step (a, b) trace at one energy")
    _add_sweep_args(t)
    t.add_argument("--energy", type=float, required=True)

    c = sub.add_parser("catalog", help="exactly solvable potentials")
    csub = c.add_subparsers(dest="action", required=True)
    csub.add_parser("list")
    ev = csub.add_parser("eval")
    ev.add_argument("name")
    ev.add_argument("--param", action="append", metavar="KEY=VALUE")
    ev.add_argument("--energy", type=float, nargs="+", required=True)
    ev.add_argument("--hbar", type=float, default=1.0)
    ev.add_argument("--mass", type=float, default=0.5)
    ev.add_argument("--format", choices=config.FORMATS, default="csv")
    ev.add_argument("--output", "-o")

    v = sub.add_parser("verify", help="catalog, bound-dominance and oscillator-mirror self-checks")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tighten", type=float, default=1.0, help="divide integrator tolerances")
    v.add_argument("--n-energies", type=int, default=10)
    v.add_argument("--n-potentials", type=int, default=20)
    v.add_argument("--n-random-energies", type=int, default=5)
    v.add_argument("--n-profiles", type=int, default=5)
    return parser


# --- commands -----------------------------------------------------------------

def cmd_sweep(args):
    spec = _spec_from_args(args)
    rows = sweep(args.command, spec)
    _emit(args, rows, COLUMNS[args.command], spec.format)
    return 0


def cmd_catalog(args):
    if args.action == "list":
        sys.stdout.write("name,params,description\n")
        for name in catalog.names():
            e = catalog.get(name)
            params = ";".join(f"{k}={v!r}" for k, v in e.defaults.items())
            sys.stdout.write(f"{name},{params},\"{e.description}\"\n")
        return 0
    try:
        entry = catalog.get(args.name)
        params = entry.params(_parse_params(args.param))
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    units = config.UnitsConfig(args.hbar, args.mass)
    rows = []
    for E in args.energy:
        if not entry.is_valid(E, units, **params):
            raise NoPropagatingMode("energy outside the closed form's range",
                                    potential=args.name, E=E)
        T = entry.exact_T(E, units, **params)
        rows.append({"E": E, "T_exact": T, "R_exact": 1.0 - T,
                     "T_printed": entry.printed_T(E, units, **params)})
    _emit(args, rows, COLUMNS["catalog"], args.format)
    return 0


def cmd_parametric(args):
    spec = _spec_from_args(args)
    profile = config.build_profile(spec.potential)
    res = parametric.evolve(profile, spec.units, tolerances=spec.tolerances)
    cases = spec.families or tuple(parametric.CASES)
    rows = []
    for case in cases:
        try:
            rep = parametric.parametric_bounds(profile, case, spec.units)
        except ScatteringError as exc:
            nan = math.nan
            rows.append({"case": case, "theta": nan, "alpha_cap": nan, "beta_cap": nan,
                         "T_floor": nan, "R_cap": nan, "abs_alpha": abs(res.alpha),
                         "abs_beta": abs(res.beta), "particle_number": res.particle_number,
                         "flag": "inadmissible", "validity": exc.code})
            continue
        margin = rep.beta_cap - abs(res.beta)
        flag = "violated" if margin < -MARGIN_SLACK * max(1.0, rep.beta_cap) else \
            ("saturated" if abs(margin) <= SATURATION_TOL else "ok")
        rows.append({"case": case, "theta": rep.theta_integral, "alpha_cap": rep.alpha_cap,
                     "beta_cap": rep.beta_cap, "T_floor": rep.T_floor, "R_cap": rep.R_cap,
                     "abs_alpha": abs(res.alpha), "abs_beta": abs(res.beta),
                     "particle_number": res.particle_number, "flag": flag,
                     "validity": rep.validity})
    _emit(args, rows, COLUMNS["parametric"], spec.format)
    return 0


def cmd_trace(args):
    spec = _spec_from_args(args)
    pot = _potential(spec.potential)
    r = integrate(pot, spec.units, args.energy, _variant(spec, pot), spec.tolerances,
                  keep_states=True)
    stream, close = _open_output(args.output)
    try:
        write_trace(r.states, stream)
    finally:
        if close:
            stream.close()
    return 0


def cmd_verify(args):
    report = verify.run(n_energies=args.n_energies, n_potentials=args.n_potentials,
                        n_random_energies=args.n_random_energies, seed=args.seed,
                        n_profiles=args.n_profiles,
                        tighten=args.tighten)
    print(report.summary())
    return 0 if report.ok else 1


COMMANDS = {"compute": cmd_sweep, "bounds": cmd_sweep, "approx": cmd_sweep,
            "catalog": cmd_catalog, "parametric": cmd_parametric, "trace": cmd_trace,
            "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = COMMANDS[args.command](args)
        sys.stdout.flush()
        return code
    except ScatteringError as exc:
        print(exc.diagnostic(), file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep the exit quiet
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (OSError, ValueError) as exc:
        err = ConfigError(str(exc).splitlines()[0] if str(exc) else type(exc).__name__)
        print(err.diagnostic(), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
