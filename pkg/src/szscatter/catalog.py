"""Closed-form transmission results for seven exactly solvable potentials.

Each entry builds a truncated :class:`Potential` and evaluates the exact T.
Where a commonly printed form disagrees with direct integration, the
integration-confirmed form is the one exposed as ``exact_T``; the printed form
is kept as ``printed_T`` so the discrepancy stays visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Mapping, Optional

import numpy as np

from .errors import NoPropagatingMode, UnderBarrier
from .potentials import (DEFAULT_TAIL_TOLERANCE, DEFAULT_UNITS, DeltaSpike, Potential,
                         UnitsConfig, constant_potential)

# Reflection off V = (V- + V+)/2 + (V+ - V-)/2 tanh(x/L) is
# (sinh[c (k- - k+) L] / sinh[c (k- + k+) L])^2 with c = pi/2.
TANH_STEP_CONSTANT = math.pi / 2
TANH_STEP_CONSTANT_PRINTED = 2 * math.pi


def _k(units, gap):
    return math.sqrt(units.ksq(gap))


def delta_T(strength, E, units: UnitsConfig = DEFAULT_UNITS):
    if E <= 0:
        raise NoPropagatingMode("delta spike needs E > 0", E=E)
    return 1.0 / (1.0 + units.mass * strength**2 / (2.0 * units.hbar**2 * E))


def delta_T_printed(strength, E, units: UnitsConfig = DEFAULT_UNITS):
    """Printed variant with hbar instead of hbar^2 (dimensionally inconsistent)."""
    return 1.0 / (1.0 + units.mass * strength**2 / (2.0 * units.hbar * E))


def double_delta_T(strength, L, E, units: UnitsConfig = DEFAULT_UNITS):
    if E <= 0 or L <= 0:
        raise NoPropagatingMode("double delta needs E > 0 and L > 0", E=E, L=L)
    k = _k(units, E)
    g = 2.0 * units.mass * strength / (units.hbar**2 * k)
    bracket = g * math.cos(k * L) + 0.5 * g * g * math.sin(k * L)
    return 1.0 / (1.0 + bracket**2)


def square_barrier_T(V_e, L, E, units: UnitsConfig = DEFAULT_UNITS):
    if E <= 0 or E <= V_e:
        raise UnderBarrier("square barrier formula is the over-barrier branch", E=E, V_e=V_e)
    s = math.sin(_k(units, E - V_e) * L)
    num = E * (E - V_e)
    return num / (num + 0.25 * V_e**2 * s * s)


def tanh_step_R(V_minus, V_plus, L, E, units: UnitsConfig = DEFAULT_UNITS,
                constant=TANH_STEP_CONSTANT):
    if E <= max(V_minus, V_plus):
        raise NoPropagatingMode("energy below a step asymptote", E=E,
                                V_minus=V_minus, V_plus=V_plus)
    km, kp = _k(units, E - V_minus), _k(units, E - V_plus)
    if km == kp:
        return 0.0
    num = math.sinh(constant * (km - kp) * L)
    den = math.sinh(constant * (km + kp) * L)
    return (num / den) ** 2


def tanh_step_T(V_minus, V_plus, L, E, units: UnitsConfig = DEFAULT_UNITS):
    return 1.0 - tanh_step_R(V_minus, V_plus, L, E, units)


def tanh_step_T_printed(V_minus, V_plus, L, E, units: UnitsConfig = DEFAULT_UNITS):
    return 1.0 - tanh_step_R(V_minus, V_plus, L, E, units, TANH_STEP_CONSTANT_PRINTED)


def sech2_T(V_e, L, E, units: UnitsConfig = DEFAULT_UNITS):
    if E <= max(0.0, V_e):
        raise UnderBarrier("sech^2 catalog entry is used above the barrier", E=E, V_e=V_e)
    x = math.pi * math.sqrt(2 * units.mass * E) * L / units.hbar
    s = 8.0 * units.mass * V_e * L**2 / units.hbar**2
    if s <= 1.0:
        d = math.cos(0.5 * math.pi * math.sqrt(1.0 - s)) ** 2
    else:
        d = math.cosh(0.5 * math.pi * math.sqrt(s - 1.0)) ** 2
    sh2 = math.sinh(x) ** 2
    return sh2 / (sh2 + d)


def asymmetric_well_T(V1, V2, V3, L, E, units: UnitsConfig = DEFAULT_UNITS):
    if E <= max(V1, V3):
        raise NoPropagatingMode("energy below an outer level", E=E, V1=V1, V3=V3)
    if E <= V2:
        raise UnderBarrier("middle region is classically forbidden", E=E, V2=V2)
    k1, k2, k3 = _k(units, E - V1), _k(units, E - V2), _k(units, E - V3)
    s2 = math.sin(k2 * L) ** 2
    den = (k1 + k3) ** 2 * k2**2 + (k1**2 * k3**2 + k2**2 * (k2**2 - k1**2 - k3**2)) * s2
    return 4.0 * k1 * k2**2 * k3 / den


def poschl_teller_asymptotes(V0, mu):
    return V0 * math.exp(-2 * mu), V0 * math.exp(2 * mu)


def poschl_teller_T(V0, mu, L, E, units: UnitsConfig = DEFAULT_UNITS):
    vm, vp = poschl_teller_asymptotes(V0, mu)
    if E <= max(vm, vp):
        raise NoPropagatingMode("energy below an asymptote", E=E, v_minus=vm, v_plus=vp)
    km, kp = _k(units, E - vm), _k(units, E - vp)
    arg = 1.0 + 8.0 * units.mass * V0 * L**2 * math.cosh(mu) ** 2 / units.hbar**2
    c = math.cos(math.pi * math.sqrt(arg)) if arg >= 0 else math.cosh(math.pi * math.sqrt(-arg))
    num = 2.0 * math.sinh(math.pi * km * L) * math.sinh(math.pi * kp * L)
    # the reflectionless tuning can round a few ulps above 1
    return min(1.0, num / (math.cosh(math.pi * (km + kp) * L) + c))


# --- potential constructors -------------------------------------------------

def delta_potential(strength, tail_tolerance=DEFAULT_TAIL_TOLERANCE):
    pot = constant_potential(0.0, (-1.0, 1.0), spikes=(DeltaSpike(0.0, strength),))
    return _named(pot, "delta", {"strength": strength})


def double_delta_potential(strength, L):
    h = 0.5 * L
    pot = constant_potential(0.0, (-h - 1.0, h + 1.0),
                             spikes=(DeltaSpike(-h, strength), DeltaSpike(h, strength)))
    return _named(pot, "double_delta", {"strength": strength, "L": L})


def _piecewise(levels, edges):
    """Step function: levels[i] on (edges[i-1], edges[i])."""
    levels = np.asarray(levels, float)
    edges = np.asarray(edges, float)

    def V(x):
        out = levels[np.searchsorted(edges, x, side="right")]
        return float(out) if np.ndim(out) == 0 else out

    def dV(x):
        return 0.0 * np.asarray(x, float)

    return V, dV


def square_barrier_potential(V_e, L):
    h = 0.5 * L
    V, dV = _piecewise([0.0, V_e, 0.0], [-h, h])
    return Potential(evaluate=V, derivative=dV, v_minus_inf=0.0, v_plus_inf=0.0,
                     domain=(-h - 1.0, h + 1.0), breakpoints=(-h, h), name="square_barrier",
                     params={"V_e": V_e, "L": L})


def asymmetric_well_potential(V1, V2, V3, L):
    V, dV = _piecewise([V1, V2, V3], [0.0, L])
    return Potential(evaluate=V, derivative=dV, v_minus_inf=V1, v_plus_inf=V3,
                     domain=(-1.0, L + 1.0), breakpoints=(0.0, L), name="asymmetric_well",
                     params={"V1": V1, "V2": V2, "V3": V3, "L": L})


def _reach(scale, rate, tol):
    """Distance beyond which scale * exp(-rate * d) < tol/10."""
    return max(math.log(max(10.0 * abs(scale) / tol, 10.0)) / rate, 1.0 / rate)


def tanh_step_potential(V_minus, V_plus, L, tail_tolerance=DEFAULT_TAIL_TOLERANCE):
    mid, half = 0.5 * (V_minus + V_plus), 0.5 * (V_plus - V_minus)
    d = _reach(2 * half, 2.0 / L, tail_tolerance) + L

    def V(x):
        return mid + half * np.tanh(np.asarray(x, float) / L)

    def dV(x):
        return half / L / np.cosh(np.asarray(x, float) / L) ** 2

    return Potential(evaluate=V, derivative=dV, v_minus_inf=V_minus, v_plus_inf=V_plus,
                     domain=(-d, d), tail_tolerance=tail_tolerance, name="tanh_step",
                     params={"V_minus": V_minus, "V_plus": V_plus, "L": L})


def sech2_potential(V_e, L, tail_tolerance=DEFAULT_TAIL_TOLERANCE):
    d = _reach(4 * V_e, 2.0 / L, tail_tolerance) + L

    def V(x):
        return V_e / np.cosh(np.asarray(x, float) / L) ** 2

    def dV(x):
        u = np.asarray(x, float) / L
        return -2.0 * V_e / L * np.tanh(u) / np.cosh(u) ** 2

    return Potential(evaluate=V, derivative=dV, v_minus_inf=0.0, v_plus_inf=0.0,
                     domain=(-d, d), tail_tolerance=tail_tolerance, name="sech2",
                     params={"V_e": V_e, "L": L})


def poschl_teller_potential(V0, mu, L, tail_tolerance=DEFAULT_TAIL_TOLERANCE):
    """V0 cosh^2(mu) (tanh((x - mu L)/L) + tanh(mu))^2; minimum-modulus point V=0 at x=0."""
    vm, vp = poschl_teller_asymptotes(V0, mu)
    ch2, th = math.cosh(mu) ** 2, math.tanh(mu)
    d = _reach(8 * abs(V0) * ch2, 2.0 / L, tail_tolerance) + L
    centre = mu * L

    def V(x):
        u = (np.asarray(x, float) - centre) / L
        return V0 * ch2 * (np.tanh(u) + th) ** 2

    def dV(x):
        u = (np.asarray(x, float) - centre) / L
        return 2.0 * V0 * ch2 * (np.tanh(u) + th) / (L * np.cosh(u) ** 2)

    return Potential(evaluate=V, derivative=dV, v_minus_inf=vm, v_plus_inf=vp,
                     domain=(centre - d, centre + d), tail_tolerance=tail_tolerance,
                     name="poschl_teller", params={"V0": V0, "mu": mu, "L": L})


def _named(pot, name, params):
    return replace(pot, name=name, params=dict(params))


# --- catalog ----------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    defaults: Mapping
    build: Callable[..., Potential]
    exact: Callable[..., float]
    valid: Callable[..., bool]
    printed: Optional[Callable[..., float]] = None
    description: str = ""
    energy_range: Callable = None  # (params, units) -> (E_min, E_max)

    def params(self, overrides=None):
        p = dict(self.defaults)
        p.update(overrides or {})
        unknown = set(p) - set(self.defaults)
        if unknown:
            raise KeyError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        return p

    def potential(self, **overrides):
        return self.build(**self.params(overrides))

    def exact_T(self, E, units: UnitsConfig = DEFAULT_UNITS, **overrides):
        return self.exact(E=E, units=units, **self.params(overrides))

    def exact_R(self, E, units: UnitsConfig = DEFAULT_UNITS, **overrides):
        return 1.0 - self.exact_T(E, units, **overrides)

    def printed_T(self, E, units: UnitsConfig = DEFAULT_UNITS, **overrides):
        f = self.printed or self.exact
        return f(E=E, units=units, **self.params(overrides))

    def is_valid(self, E, units: UnitsConfig = DEFAULT_UNITS, **overrides):
        try:
            return bool(self.valid(E=E, units=units, **self.params(overrides)))
        except (ValueError, ZeroDivisionError, OverflowError):
            return False

    def energy_grid(self, n=50, units: UnitsConfig = DEFAULT_UNITS, **overrides):
        lo, hi = self.energy_range(self.params(overrides), units)
        return np.linspace(lo, hi, n)


def _pt_valid(V0, mu, L, E, units):
    if not (math.isfinite(mu) and abs(mu) < 10 and L > 0):
        return False
    return E > max(poschl_teller_asymptotes(V0, mu))


def _span(lo, hi):
    return lambda p, u: (lo(p, u), hi(p, u))


CATALOG: Dict[str, CatalogEntry] = {}


def _register(entry):
    CATALOG[entry.name] = entry
    return entry


_register(CatalogEntry(
    "delta", {"strength": 2.0},
    build=lambda strength: delta_potential(strength),
    exact=lambda strength, E, units: delta_T(strength, E, units),
    printed=lambda strength, E, units: delta_T_printed(strength, E, units),
    valid=lambda strength, E, units: E > 0,
    description="V = strength * delta(x)",
    energy_range=_span(lambda p, u: 0.05, lambda p, u: 10.0),
))
_register(CatalogEntry(
    "double_delta", {"strength": 1.0, "L": 1.0},
    build=lambda strength, L: double_delta_potential(strength, L),
    exact=lambda strength, L, E, units: double_delta_T(strength, L, E, units),
    valid=lambda strength, L, E, units: E > 0 and L > 0,
    description="V = strength * (delta(x - L/2) + delta(x + L/2))",
    energy_range=_span(lambda p, u: 0.05, lambda p, u: 10.0),
))
_register(CatalogEntry(
    "square_barrier", {"V_e": 0.5, "L": 2.0},
    build=lambda V_e, L: square_barrier_potential(V_e, L),
    exact=lambda V_e, L, E, units: square_barrier_T(V_e, L, E, units),
    valid=lambda V_e, L, E, units: E > max(0.0, V_e) and L > 0,
    description="V = V_e on |x| < L/2, over-barrier branch",
    energy_range=_span(lambda p, u: max(0.0, p["V_e"]) + 0.02, lambda p, u: max(0.0, p["V_e"]) + 10.0),
))
_register(CatalogEntry(
    "tanh_step", {"V_minus": 0.0, "V_plus": 0.75, "L": 1.0},
    build=lambda V_minus, V_plus, L: tanh_step_potential(V_minus, V_plus, L),
    exact=lambda V_minus, V_plus, L, E, units: tanh_step_T(V_minus, V_plus, L, E, units),
    printed=lambda V_minus, V_plus, L, E, units: tanh_step_T_printed(V_minus, V_plus, L, E, units),
    valid=lambda V_minus, V_plus, L, E, units: E > max(V_minus, V_plus) and L > 0,
    description="smoothed step (V- + V+)/2 + (V+ - V-)/2 tanh(x/L)",
    energy_range=_span(lambda p, u: max(p["V_minus"], p["V_plus"]) + 0.02,
                       lambda p, u: max(p["V_minus"], p["V_plus"]) + 10.0),
))
_register(CatalogEntry(
    "sech2", {"V_e": 0.1, "L": 1.0},
    build=lambda V_e, L: sech2_potential(V_e, L),
    exact=lambda V_e, L, E, units: sech2_T(V_e, L, E, units),
    valid=lambda V_e, L, E, units: E > max(0.0, V_e) and L > 0,
    description="V = V_e sech^2(x/L)",
    energy_range=_span(lambda p, u: max(0.0, p["V_e"]) + 0.02, lambda p, u: max(0.0, p["V_e"]) + 10.0),
))
_register(CatalogEntry(
    "asymmetric_well", {"V1": 0.0, "V2": -3.0, "V3": -1.0, "L": 1.0},
    build=lambda V1, V2, V3, L: asymmetric_well_potential(V1, V2, V3, L),
    exact=lambda V1, V2, V3, L, E, units: asymmetric_well_T(V1, V2, V3, L, E, units),
    valid=lambda V1, V2, V3, L, E, units: E > max(V1, V2, V3) and L > 0,
    description="V1 for x < 0, V2 on (0, L), V3 for x > L",
    energy_range=_span(lambda p, u: max(p["V1"], p["V2"], p["V3"]) + 0.02,
                       lambda p, u: max(p["V1"], p["V2"], p["V3"]) + 10.0),
))
_register(CatalogEntry(
    "poschl_teller", {"V0": -0.2, "mu": 0.3, "L": 1.0},
    build=lambda V0, mu, L: poschl_teller_potential(V0, mu, L),
    exact=lambda V0, mu, L, E, units: poschl_teller_T(V0, mu, L, E, units),
    valid=_pt_valid,
    description="V0 cosh^2(mu) (tanh((x - mu L)/L) + tanh(mu))^2",
    energy_range=_span(lambda p, u: max(0.0, *poschl_teller_asymptotes(p["V0"], p["mu"])) + 0.02,
                       lambda p, u: max(0.0, *poschl_teller_asymptotes(p["V0"], p["mu"])) + 10.0),
))


def get(name) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {sorted(CATALOG)}") from None


def names():
    return sorted(CATALOG)
