"""Parametrically driven oscillators, phi'' + omega(t)^2 phi = 0.

Time plays the role of position and omega(t) the role of k(x). The mapping to
a potential problem is exact: with E = (hbar^2/2m) k_ref^2 and
V_eff(t) = (hbar^2/2m) (k_ref^2 - omega(t)^2) one has k(t) = omega(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate as sp_integrate

from . import bounds as _bounds
from .bounds import BoundReport, Family
from .engine import PhaseVariant, Tolerances, integrate
from .errors import AsymmetricAsymptotes, NonAlternatingProfile, TurningPoint
from .potentials import (DEFAULT_TAIL_TOLERANCE, DEFAULT_UNITS, Potential, UnitsConfig,
                         _chunked_quad, _sign_changes, find_extrema)

CASES = {
    "1": Family.CASE1,
    "2": Family.CASE2,
    "2a": Family.CASE2A,
    "2b": Family.CASE2B,
    "2bAsym": Family.CASE2B_ASYM,
    "2c": Family.CASE2C,
}


@dataclass(frozen=True)
class FrequencyProfile:
    omega: Callable
    omega_minus_inf: float
    omega_plus_inf: float
    domain: tuple
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    d_omega: Optional[Callable] = None
    name: str = "profile"

    def __post_init__(self):
        if not (self.omega_minus_inf > 0 and self.omega_plus_inf > 0):
            raise TurningPoint("asymptotic frequencies must be positive",
                               omega_minus_inf=self.omega_minus_inf,
                               omega_plus_inf=self.omega_plus_inf)

    def sample(self, ts):
        ts = np.asarray(ts, float)
        out = np.asarray(self.omega(ts), float)
        return out if out.shape == ts.shape else np.array([self.omega(float(t)) for t in ts])

    def check(self, n=4096):
        ts = np.linspace(*self.domain, n)
        w = self.sample(ts)
        if np.any(w**2 <= 0) or np.any(w <= 0):
            i = int(np.argmin(w))
            raise TurningPoint("omega(t) must stay positive", t=float(ts[i]), omega=float(w[i]))


@dataclass(frozen=True)
class ParametricProblem:
    potential: Potential
    energy: float
    units: UnitsConfig
    profile: FrequencyProfile


def to_scattering(profile: FrequencyProfile, units: UnitsConfig = DEFAULT_UNITS) -> ParametricProblem:
    profile.check()
    scale = 1.0 / units.ksq_per_energy  # hbar^2 / 2m
    k_ref = max(profile.omega_minus_inf, profile.omega_plus_inf)
    E = scale * k_ref**2
    w = profile.omega
    dw = profile.d_omega

    def V(t):
        return scale * (k_ref**2 - np.asarray(w(t), float) ** 2)

    def dV(t):
        if dw is None:
            h = 1e-5
            deriv = (np.asarray(w(t + h), float) - np.asarray(w(t - h), float)) / (2 * h)
        else:
            deriv = np.asarray(dw(t), float)
        return -2.0 * scale * np.asarray(w(t), float) * deriv

    wmax = max(profile.omega_minus_inf, profile.omega_plus_inf)
    tol = scale * profile.tail_tolerance * (2.0 * wmax + profile.tail_tolerance)
    pot = Potential(
        evaluate=V, derivative=dV,
        v_minus_inf=scale * (k_ref**2 - profile.omega_minus_inf**2),
        v_plus_inf=scale * (k_ref**2 - profile.omega_plus_inf**2),
        domain=profile.domain, tail_tolerance=tol, name=f"oscillator:{profile.name}",
    )
    return ParametricProblem(pot, E, units, profile)


def evolve(profile: FrequencyProfile, units: UnitsConfig = DEFAULT_UNITS,
           phase_variant=PhaseVariant.WKB, tolerances: Tolerances = Tolerances()):
    """Bogolubov coefficients of the oscillator; |beta|^2 is the particle number."""
    prob = to_scattering(profile, units)
    return integrate(prob.potential, prob.units, prob.energy, phase_variant, tolerances)


def parametric_bounds(profile: FrequencyProfile, case: str,
                      units: UnitsConfig = DEFAULT_UNITS) -> BoundReport:
    """Bound report for one oscillator sub-case, via the scattering bounds."""
    family = CASES[str(case)]
    prob = to_scattering(profile, units)
    pot, E = prob.potential, prob.energy
    if family is Family.CASE1:
        return _bounds.case1_bound(pot, units, E)[0]
    if family is Family.CASE2:
        return _bounds.case2_bound(pot, units, E)
    profile_ext = find_extrema(pot, units, E)
    _check_case(family, profile_ext, profile)
    return _bounds.multi_extrema_bound(profile_ext)


def _check_case(family, prof, profile):
    n = len(prof)
    symmetric = profile.omega_minus_inf == profile.omega_plus_inf
    if family is Family.CASE2A and n != 0:
        raise NonAlternatingProfile("case 2a needs a monotonic omega", extrema=n)
    if family is Family.CASE2B and (n != 1 or not symmetric):
        raise NonAlternatingProfile("case 2b needs one extremum and equal asymptotes",
                                    extrema=n, symmetric=symmetric)
    if family is Family.CASE2B_ASYM and n != 1:
        raise NonAlternatingProfile("case 2bAsym needs exactly one extremum", extrema=n)


# --- oscillator-native forms -------------------------------------------------
# These are written directly in omega and are checked against the
# scattering-side reports above.

def oscillator_case1_theta(profile: FrequencyProfile):
    w0 = profile.omega_plus_inf
    if profile.omega_minus_inf != w0:
        raise AsymmetricAsymptotes("case 1 needs omega(-inf) == omega(+inf)")
    g = lambda t: float(profile.omega(t)) ** 2 - w0**2
    lo, hi = profile.domain
    pts = _sign_changes(g, lo, hi)
    return _chunked_quad(lambda t: abs(g(t)), lo, hi, points=pts) / (2.0 * w0)


def oscillator_case2_theta(profile: FrequencyProfile):
    lo, hi = profile.domain
    if profile.d_omega is None:
        dw = lambda t: (float(profile.omega(t + 1e-5)) - float(profile.omega(t - 1e-5))) / 2e-5
    else:
        dw = lambda t: float(profile.d_omega(t))
    pts = _sign_changes(dw, lo, hi)
    return 0.5 * _chunked_quad(lambda t: abs(dw(t)) / float(profile.omega(t)), lo, hi,
                               points=pts)


def oscillator_monotonic_caps(w_minus, w_plus):
    """(|alpha| cap, |beta| cap) for a monotonic omega."""
    root = 2.0 * math.sqrt(w_minus * w_plus)
    return (w_minus + w_plus) / root, abs(w_minus - w_plus) / root


def oscillator_single_extremum_caps(w_minus, w_plus, w_ext):
    root = 2.0 * math.sqrt(w_minus * w_plus) * w_ext
    return (w_minus * w_plus + w_ext**2) / root, abs(w_minus * w_plus - w_ext**2) / root


def oscillator_multi_extrema_caps(w_minus, w_plus, peaks, valleys, first_kind, last_kind):
    pi_p = math.prod(peaks)
    pi_v = math.prod(valleys)
    if first_kind == "valley":
        pi_p *= w_minus
    if last_kind == "valley":
        pi_p *= w_plus
    pi_e = math.prod(peaks) * math.prod(valleys)
    extra = (w_minus if first_kind == "valley" else 1.0) * (w_plus if last_kind == "valley" else 1.0)
    root = 2.0 * math.sqrt(w_minus * w_plus) * pi_e * extra
    a = w_minus * w_plus * pi_v**2
    return (a + pi_p**2) / root, abs(a - pi_p**2) / root
