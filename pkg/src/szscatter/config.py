"""Declarative sweep configuration (YAML or JSON).

Schema, version 1::

    schema_version: 1
    units: {hbar: 1.0, mass: 0.5}
    potential:
      kind: sech2            # catalog name, "tabulated", "expression" or "frequency"
      params: {V_e: 0.1, L: 1.0}
      domain: [-20, 20]      # truncation interval (tabulated: taken from the table)
      tail_tolerance: 1.0e-10
      points: [[x, V], ...]  # tabulated only
      expr: "V_e/cosh(x/L)**2"   # expression (variable x) or frequency (variable t)
    energies: {min: 0.2, max: 5.0, count: 20, spacing: linear}
    families: [General, Case1, Case2]   # empty or absent: every admissible family
    phase: constant_k
    format: csv
    tolerances: {rtol: 1.0e-10, atol: 1.0e-12}
    seed: 0

Command-line flags override file values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Tuple

import numpy as np
import sympy as sp
import yaml
from scipy.interpolate import CubicSpline

from . import catalog
from .engine import PhaseVariant, Tolerances
from .errors import ConfigError
from .parametric import FrequencyProfile
from .potentials import DEFAULT_TAIL_TOLERANCE, DEFAULT_UNITS, Potential, UnitsConfig

SCHEMA_VERSION = 1
SPACINGS = ("linear", "log")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    params: Mapping = field(default_factory=dict)
    domain: Optional[Tuple[float, float]] = None
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    points: Optional[tuple] = None
    expr: Optional[str] = None

    @property
    def is_frequency(self):
        return self.kind == "frequency"


@dataclass(frozen=True)
class EnergyGrid:
    min: float
    max: float
    count: int = 1
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("energy count must be >= 1", count=self.count)
        if self.count > 1 and not self.min < self.max:
            raise ConfigError("energy min must be below max", min=self.min, max=self.max)
        if self.spacing not in SPACINGS:
            raise ConfigError("unknown energy spacing", spacing=self.spacing)
        if self.spacing == "log" and self.min <= 0:
            raise ConfigError("log spacing needs a positive minimum", min=self.min)

    def values(self):
        if self.count == 1:
            return np.array([float(self.min)])
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepSpec:
    potential: PotentialSpec
    energies: Optional[EnergyGrid] = None
    units: UnitsConfig = DEFAULT_UNITS
    families: Tuple[str, ...] = ()
    phase: PhaseVariant = PhaseVariant.CONSTANT_K
    format: str = "csv"
    tolerances: Tolerances = Tolerances()
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError("unknown output format", format=self.format)

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        grid = {k: kw.pop(k) for k in ("min", "max", "count", "spacing") if k in kw}
        spec = replace(self, **kw)
        if grid:
            base = spec.energies
            fields_ = dict(min=base.min, max=base.max, count=base.count, spacing=base.spacing) \
                if base else dict(count=1, spacing="linear")
            fields_.update(grid)
            if "min" not in fields_:
                raise ConfigError("energy grid needs a minimum")
            fields_.setdefault("max", fields_["min"])
            spec = replace(spec, energies=EnergyGrid(**fields_))
        return spec


# --- parsing ----------------------------------------------------------------

def load(path) -> SweepSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot parse config", path=str(path),
                          detail=str(exc).splitlines()[0]) from None
    return parse(data)


def parse(data) -> SweepSpec:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a mapping")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("unsupported schema_version", found=version, expected=SCHEMA_VERSION)
    known = {"schema_version", "units", "potential", "energies", "families", "phase",
             "format", "tolerances", "seed"}
    extra = set(data) - known
    if extra:
        raise ConfigError("unknown config keys", keys=",".join(sorted(extra)))
    if "potential" not in data:
        raise ConfigError("config needs a potential section")
    try:
        units = UnitsConfig(**(data.get("units") or {}))
        energies = EnergyGrid(**data["energies"]) if data.get("energies") else None
        tol = Tolerances(**(data.get("tolerances") or {}))
        phase = PhaseVariant(data.get("phase", PhaseVariant.CONSTANT_K.value))
    except (TypeError, ValueError) as exc:
        raise ConfigError("invalid config value", detail=str(exc)) from None
    families = data.get("families") or ()
    if isinstance(families, str):
        families = (families,)
    return SweepSpec(
        potential=parse_potential(data["potential"]),
        energies=energies,
        units=units,
        families=tuple(str(f) for f in families),
        phase=phase,
        format=data.get("format", "csv"),
        tolerances=tol,
        seed=int(data.get("seed", 0)),
    )


def parse_potential(d) -> PotentialSpec:
    if isinstance(d, str):
        d = {"kind": d}
    if not isinstance(d, Mapping) or "kind" not in d:
        raise ConfigError("potential needs a kind")
    domain = d.get("domain")
    if domain is not None:
        if len(domain) != 2 or not float(domain[0]) < float(domain[1]):
            raise ConfigError("domain must be [lo, hi] with lo < hi", domain=str(domain))
        domain = (float(domain[0]), float(domain[1]))
    points = d.get("points")
    if points is not None:
        points = tuple((float(x), float(v)) for x, v in points)
    return PotentialSpec(
        kind=str(d["kind"]),
        params={k: float(v) for k, v in (d.get("params") or {}).items()},
        domain=domain,
        tail_tolerance=float(d.get("tail_tolerance", DEFAULT_TAIL_TOLERANCE)),
        points=points,
        expr=d.get("expr"),
    )


# --- construction -------------------------------------------------------------

def build_potential(spec: PotentialSpec) -> Potential:
    if spec.kind == "tabulated":
        return tabulated_potential(spec.points, spec.tail_tolerance)
    if spec.kind == "expression":
        return expression_potential(spec.expr, spec.params, spec.domain, spec.tail_tolerance)
    if spec.kind == "frequency":
        raise ConfigError("a frequency profile is not a potential; use the parametric command")
    try:
        entry = catalog.get(spec.kind)
        pot = entry.potential(**spec.params)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]), kind=spec.kind) from None
    if spec.domain is not None:
        pot = replace(pot, domain=spec.domain)
    return pot


def build_profile(spec: PotentialSpec) -> FrequencyProfile:
    if spec.kind != "frequency":
        raise ConfigError("parametric runs need a potential of kind 'frequency'", kind=spec.kind)
    f, df = _lambdify(spec.expr, spec.params, "t")
    lo, hi = _require_domain(spec)
    return FrequencyProfile(omega=f, d_omega=df, omega_minus_inf=float(f(lo)),
                            omega_plus_inf=float(f(hi)), domain=(lo, hi),
                            tail_tolerance=spec.tail_tolerance, name=spec.expr)


def tabulated_potential(points, tail_tolerance=DEFAULT_TAIL_TOLERANCE) -> Potential:
    """Cubic spline through (x, V) pairs, flat outside the table."""
    if not points or len(points) < 4:
        raise ConfigError("tabulated potential needs at least 4 points")
    xs, vs = np.array(points, float).T
    if np.any(np.diff(xs) <= 0):
        raise ConfigError("tabulated x values must be strictly increasing")
    spline = CubicSpline(xs, vs)
    dspline = spline.derivative()
    lo, hi = float(xs[0]), float(xs[-1])
    V = lambda x: spline(np.clip(x, lo, hi))
    dV = lambda x: np.where((np.asarray(x) < lo) | (np.asarray(x) > hi), 0.0,
                            dspline(np.clip(x, lo, hi)))
    return Potential(evaluate=V, derivative=dV, v_minus_inf=float(vs[0]),
                     v_plus_inf=float(vs[-1]), domain=(lo, hi),
                     tail_tolerance=tail_tolerance, name="tabulated")


def expression_potential(expr, params, domain, tail_tolerance=DEFAULT_TAIL_TOLERANCE) -> Potential:
    f, df = _lambdify(expr, params, "x")
    lo, hi = _require_domain(PotentialSpec("expression", params, domain))
    return Potential(evaluate=f, derivative=df, v_minus_inf=float(f(lo)),
                     v_plus_inf=float(f(hi)), domain=(lo, hi),
                     tail_tolerance=tail_tolerance, name=f"expression:{expr}",
                     params=dict(params))


def _require_domain(spec):
    if spec.domain is None:
        raise ConfigError("expression potentials need a domain", kind=spec.kind)
    return spec.domain


def _lambdify(expr, params, var):
    if not expr:
        raise ConfigError("missing expr")
    sym = sp.Symbol(var, real=True)
    local = {var: sym, **{k: sp.Float(v) for k, v in params.items()}}
    try:
        e = sp.parse_expr(str(expr), local_dict=local)
    except (SyntaxError, TypeError, sp.SympifyError) as exc:
        raise ConfigError("cannot parse expression", expr=expr, detail=str(exc)) from None
    free = e.free_symbols - {sym}
    if free:
        raise ConfigError("expression has unbound symbols",
                          symbols=",".join(sorted(map(str, free))))
    f = sp.lambdify(sym, e, "numpy")
    df = sp.lambdify(sym, sp.diff(e, sym), "numpy")
    # lambdify returns scalars for constant expressions; broadcast them
    return _broadcast(f), _broadcast(df)


def _broadcast(g):
    def h(x):
        out = g(x)
        return np.broadcast_to(np.asarray(out, float), np.shape(x)).copy() \
            if np.ndim(out) < np.ndim(x) else np.asarray(out, float)
    return h

