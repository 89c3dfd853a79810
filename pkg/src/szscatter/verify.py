"""Self-checks: engine vs exact catalog, bound dominance on random potentials, and the
oscillator forms mirrored against the scattering-side reports."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List

import numpy as np

from scipy import optimize

from . import bounds as _bounds
from . import catalog
from . import parametric as _par
from .engine import PhaseVariant, Tolerances, integrate
from .errors import ScatteringError
from .potentials import DEFAULT_UNITS, UnitsConfig, gaussian_sum_potential


@dataclass
class Check:
    suite: str
    potential: str
    energy: float
    family: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: List[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        lines = []
        for suite in dict.fromkeys(c.suite for c in self.checks):
            cs = [c for c in self.checks if c.suite == suite]
            bad = [c for c in cs if not c.passed]
            lines.append(f"{suite:<10} {'PASS' if not bad else 'FAIL'} "
                         f"{len(cs) - len(bad)}/{len(cs)}")
        for c in self.failures:
            lines.append(f"FAIL {c.suite} potential={c.potential} E={c.energy!r} "
                         f"family={c.family} {c.detail}")
        lines.append(f"elapsed {self.seconds:.1f}s")
        return "\n".join(lines)


def random_smooth_potential(rng: np.random.Generator, n_max=4):
    """Sum of 1..n_max Gaussians, amplitudes in [-1, 1], widths in [0.3, 2]."""
    n = int(rng.integers(1, n_max + 1))
    A = rng.uniform(-1.0, 1.0, n)
    c = rng.uniform(-3.0, 3.0, n)
    w = rng.uniform(0.3, 2.0, n)
    return gaussian_sum_potential(A, c, w, name="random")


def random_energies(rng, pot, n, units: UnitsConfig = DEFAULT_UNITS):
    """Energies above every asymptote, spread from near threshold to well above the top."""
    top = max(pot.max_value(), pot.v_minus_inf, pot.v_plus_inf)
    floor = max(pot.v_minus_inf, pot.v_plus_inf)
    lo = floor + 0.05
    return np.sort(rng.uniform(lo, max(top, lo) + 5.0, n))


def catalog_suite(n_energies=10, units: UnitsConfig = DEFAULT_UNITS,
                  tolerances: Tolerances = Tolerances(), rtol=1e-6):
    checks = []
    for name in catalog.names():
        entry = catalog.get(name)
        pot = entry.potential()
        for E in entry.energy_grid(n_energies, units):
            E = float(E)
            try:
                res = integrate(pot, units, E, PhaseVariant.CONSTANT_K
                                if pot.symmetric_asymptotes else PhaseVariant.WKB, tolerances)
                T_exact = entry.exact_T(E, units)
                err = abs(res.T - T_exact) / T_exact
                ok = err <= rtol and abs(res.T + res.R - 1.0) <= 1e-7
                detail = f"rel_err={err:.3e}"
            except ScatteringError as exc:
                ok, detail = False, exc.diagnostic()
            checks.append(Check("catalog", name, E, "exact", ok, detail))
    return checks


def dominance_checks(pot, units, E, tolerances, slack, label):
    """Every admissible family against one numerical integration."""
    checks = []
    variant = PhaseVariant.CONSTANT_K if pot.symmetric_asymptotes else PhaseVariant.WKB
    res = integrate(pot, units, E, variant, tolerances)
    for rep in _bounds.admissible_bounds(pot, units, E):
        bad = rep.violations(T=res.T, R=res.R, alpha=res.alpha, beta=res.beta, slack=slack)
        checks.append(Check("dominance", label, float(E), rep.family, not bad,
                            ",".join(bad) + (f" T={res.T!r} floor={rep.T_floor!r}" if bad else "")))
    return checks


def dominance_suite(n_potentials=20, n_energies=5, seed=0, units: UnitsConfig = DEFAULT_UNITS,
                    tolerances: Tolerances = Tolerances(), slack=1e-9, include_catalog=True):
    rng = np.random.default_rng(seed)
    checks = []
    for i in range(n_potentials):
        pot = random_smooth_potential(rng)
        for E in random_energies(rng, pot, n_energies, units):
            checks.extend(dominance_checks(pot, units, E, tolerances, slack,
                                           f"random[seed={seed},i={i}]"))
    if include_catalog:
        for name in catalog.names():
            entry = catalog.get(name)
            pot = entry.potential()
            for E in entry.energy_grid(4, units):
                checks.extend(dominance_checks(pot, units, float(E), tolerances, slack, name))
    return checks


def random_frequency_profile(rng: np.random.Generator, n_max=3):
    """omega0 plus 1..n_max sech^2 bumps, half the time riding on a tanh step."""
    w0 = float(rng.uniform(0.8, 1.5))
    n = int(rng.integers(1, n_max + 1))
    A = rng.uniform(-0.3, 0.5, n) * w0
    c = rng.uniform(-3.0, 3.0, n)
    w = rng.uniform(0.4, 1.5, n)
    d = float(rng.uniform(-0.3, 0.3)) * w0 if rng.random() < 0.5 else 0.0
    s = float(rng.uniform(0.5, 1.5))

    def omega(t):
        t = np.asarray(t, float)
        u = (t[..., None] - c) / w
        return w0 + np.sum(A / np.cosh(u) ** 2, axis=-1) + 0.5 * d * (1.0 + np.tanh(t / s))

    def d_omega(t):
        t = np.asarray(t, float)
        u = (t[..., None] - c) / w
        bumps = np.sum(-2.0 * A / w * np.tanh(u) / np.cosh(u) ** 2, axis=-1)
        return bumps + 0.5 * d / s / np.cosh(t / s) ** 2

    return _par.FrequencyProfile(omega, w0, w0 + d, (-30.0, 30.0), d_omega=d_omega,
                                 name="random_omega")


def omega_extrema(profile, n_grid=20_001, rel_prune=1e-9):
    """(position, omega, kind) for the interior extrema of omega, scanned in t directly."""
    ts = np.linspace(*profile.domain, n_grid)
    ws = profile.sample(ts)
    out = []
    for i in range(1, n_grid - 1):
        if ws[i] > ws[i - 1] and ws[i] >= ws[i + 1]:
            sign, kind = -1.0, "peak"
        elif ws[i] < ws[i - 1] and ws[i] <= ws[i + 1]:
            sign, kind = 1.0, "valley"
        else:
            continue
        res = optimize.minimize_scalar(lambda t: sign * float(profile.omega(t)),
                                       bounds=(ts[i - 1], ts[i + 1]), method="bounded",
                                       options={"xatol": 1e-12})
        out.append((float(res.x), float(profile.omega(res.x)), kind))
    # flat tails can leave wiggles at roundoff level
    scale = float(np.ptp(ws)) or 1.0
    return [e for e in out
            if min(abs(e[1] - profile.omega_minus_inf), abs(e[1] - profile.omega_plus_inf))
            > rel_prune * scale or len(out) == 1]


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def mirror_checks(profile, units: UnitsConfig = DEFAULT_UNITS, label="profile", rtol_quad=1e-12,
                  rtol_closed=1e-10):
    """Oscillator-native forms against the scattering-side reports for one profile."""
    checks = []

    def add(family, err, rtol):
        checks.append(Check("mirror", label, float("nan"), family, err <= rtol,
                            f"rel_err={err:.3e}"))

    if profile.omega_minus_inf == profile.omega_plus_inf:
        add("case1", _rel(_par.parametric_bounds(profile, "1", units).theta_integral,
                          _par.oscillator_case1_theta(profile)), rtol_quad)
    add("case2", _rel(_par.parametric_bounds(profile, "2", units).theta_integral,
                      _par.oscillator_case2_theta(profile)), rtol_quad)

    wm, wp = profile.omega_minus_inf, profile.omega_plus_inf
    ext = omega_extrema(profile)
    if not ext:
        caps = _par.oscillator_monotonic_caps(wm, wp)
    elif len(ext) == 1:
        caps = _par.oscillator_single_extremum_caps(wm, wp, ext[0][1])
    else:
        peaks = [e[1] for e in ext if e[2] == "peak"]
        valleys = [e[1] for e in ext if e[2] == "valley"]
        caps = _par.oscillator_multi_extrema_caps(wm, wp, peaks, valleys, ext[0][2], ext[-1][2])
    prob = _par.to_scattering(profile, units)
    prof = _bounds.find_extrema(prob.potential, units, prob.energy)
    if len(prof) != len(ext):
        checks.append(Check("mirror", label, float("nan"), "extrema", False,
                            f"omega-side {len(ext)} vs scattering-side {len(prof)}"))
        return checks
    rep = _bounds.multi_extrema_bound(prof)
    add(f"{rep.family}:alpha", _rel(caps[0], rep.alpha_cap), rtol_closed)
    add(f"{rep.family}:beta", _rel(caps[1], rep.beta_cap), rtol_closed)
    return checks


def mirror_suite(n_profiles=20, seed=0, units: UnitsConfig = DEFAULT_UNITS):
    rng = np.random.default_rng(seed)
    checks = []
    for i in range(n_profiles):
        checks.extend(mirror_checks(random_frequency_profile(rng), units,
                                    f"omega[seed={seed},i={i}]"))
    return checks


def run(n_energies=10, n_potentials=20, n_random_energies=5, seed=0,
        units: UnitsConfig = DEFAULT_UNITS, tighten=1.0, slack=1e-9, n_profiles=5) -> VerifyReport:
    t0 = time.perf_counter()
    tol = Tolerances().tightened(tighten) if tighten != 1.0 else Tolerances()
    report = VerifyReport()
    report.checks.extend(catalog_suite(n_energies, units, tol))
    report.checks.extend(dominance_suite(n_potentials, n_random_energies, seed, units, tol, slack))
    report.checks.extend(mirror_suite(n_profiles, seed, units))
    report.seconds = time.perf_counter() - t0
    return report

