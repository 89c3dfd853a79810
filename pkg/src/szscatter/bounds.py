"""Rigorous bounds on |alpha|, |beta|, T and R.

Every family reduces to a single non-negative number theta with

    |alpha| <= cosh(theta), |beta| <= sinh(theta),
    T >= sech^2(theta),     R <= tanh^2(theta).

The quadrature families integrate the phase functional ``vartheta``; the
extremum families evaluate the same integral in closed form from the extrema
of k(x).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .engine import PhaseVariant, make_phase
from .errors import (AsymmetricAsymptotes, NoPropagatingMode, PhaseDerivativeZero,
                     TurningPoint)
from .potentials import (DEFAULT_UNITS, ExtremaProfile, Potential, UnitsConfig,
                         _chunked_quad, _sign_changes, asymptotic_wavenumbers,
                         find_extrema, l1_shifted_norm)


class Family(str, Enum):
    GENERAL = "General"
    CASE1 = "Case1"
    CASE1_WEAK = "Case1Weak"
    CASE2 = "Case2"
    CASE2A = "Case2a"
    CASE2B = "Case2b"
    CASE2B_ASYM = "Case2bAsym"
    CASE2C = "Case2c"


@dataclass(frozen=True)
class BoundReport:
    family: str
    theta_integral: float
    alpha_cap: float
    beta_cap: float
    T_floor: float
    R_cap: float
    validity: str = "valid"

    def violations(self, T=None, R=None, alpha=None, beta=None, slack=1e-9):
        """Names of the inequalities that a numerical result breaks."""
        bad = []
        if T is not None and T < self.T_floor - slack:
            bad.append("T_floor")
        if R is not None and R > self.R_cap + slack:
            bad.append("R_cap")
        if alpha is not None and abs(alpha) > self.alpha_cap * (1 + slack) + slack:
            bad.append("alpha_cap")
        if beta is not None and abs(beta) > self.beta_cap * (1 + slack) + slack:
            bad.append("beta_cap")
        return bad

    def to_dict(self):
        d = asdict(self)
        d["family"] = str(self.family)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def report_from_theta(family, theta) -> BoundReport:
    return BoundReport(
        family=Family(family).value,
        theta_integral=theta,
        alpha_cap=math.cosh(theta),
        beta_cap=math.sinh(theta),
        T_floor=1.0 / math.cosh(theta) ** 2,
        R_cap=math.tanh(theta) ** 2,
    )


def report_from_pair(family, A, B) -> BoundReport:
    """Closed forms for theta = |ln(A/B)|/2 with A, B > 0."""
    if not (A > 0 and B > 0):
        raise NoPropagatingMode("wavenumber products must be positive", A=A, B=B)
    s = A + B
    root = 2.0 * math.sqrt(A * B)
    return BoundReport(
        family=Family(family).value,
        theta_integral=0.5 * abs(math.log(A / B)),
        alpha_cap=s / root,
        beta_cap=abs(A - B) / root,
        T_floor=4.0 * A * B / s**2,
        R_cap=(A - B) ** 2 / s**2,
    )


def vartheta(dphi, ddphi, ksq):
    """sqrt(phi''^2 + (k^2 - phi'^2)^2) / (2 |phi'|)."""
    if dphi == 0:
        raise PhaseDerivativeZero("phi' vanishes")
    return math.hypot(ddphi, ksq - dphi * dphi) / (2.0 * abs(dphi))


def _kink_points(f, a, b, vec=None):
    return _sign_changes(f, a, b, n=1024, vec=vec)


def general_bound(pot: Potential, units: UnitsConfig = DEFAULT_UNITS, E: float = 1.0,
                  phase_variant=PhaseVariant.CONSTANT_K, family=Family.GENERAL) -> BoundReport:
    """Quadrature of vartheta along the domain for the chosen phase."""
    phase = make_phase(pot, units, E, phase_variant)
    wkb = phase.variant is PhaseVariant.WKB
    if wkb and pot.spikes:
        raise TurningPoint("a delta spike is an infinite barrier for the WKB phase",
                           spikes=len(pot.spikes))
    theta = 0.0
    for a, b in pot.segments():
        pad = 1e-12 * max(1.0, abs(a), abs(b))
        clamp = lambda x, a=a, b=b, pad=pad: min(max(x, a + pad), b - pad)

        def integrand(x):
            x = clamp(x)
            return vartheta(phase.dphi(x), phase.ddphi(x), phase.ksq(x))

        if wkb:
            pts = _kink_points(lambda x: float(pot.dV(clamp(x))), a, b,
                               vec=lambda xs: pot.sample_dV(np.clip(xs, a + pad, b - pad)))
        else:
            pts = _kink_points(lambda x: float(pot.evaluate(clamp(x))) - pot.v_plus_inf, a, b,
                               vec=lambda xs: pot.sample(np.clip(xs, a + pad, b - pad))
                               - pot.v_plus_inf)
        theta += _chunked_quad(integrand, a, b, points=pts)
    for x0 in pot.interfaces():
        if wkb:
            # a jump in V is a jump in ln k: contributes |ln(k_R/k_L)|/2
            theta += 0.5 * abs(math.log(phase.dphi_sided(x0, +1) / phase.dphi_sided(x0, -1)))
        else:
            strength = sum(s.strength for s in pot.spikes if s.location == x0)
            # vartheta carries (c/2k) |V - V_inf|; a spike integrates to its strength
            theta += vartheta(phase.k_inf, 0.0, phase.k_inf**2 + phase.c * abs(strength)) \
                if strength else 0.0
    return report_from_theta(family, theta)


def case1_bound(pot: Potential, units: UnitsConfig = DEFAULT_UNITS, E: float = 1.0):
    """(Case1, Case1Weak) reports from the L1 norm of V - V_inf."""
    if not pot.symmetric_asymptotes:
        raise AsymmetricAsymptotes("Case 1 needs V(-inf) == V(+inf)",
                                   v_minus_inf=pot.v_minus_inf, v_plus_inf=pot.v_plus_inf)
    v_inf = pot.v_plus_inf
    if E <= v_inf:
        raise NoPropagatingMode("E must exceed V_inf", E=E, v_inf=v_inf)
    I = l1_shifted_norm(pot, v_inf)
    theta = math.sqrt(units.mass / (2.0 * (E - v_inf))) * I / units.hbar
    strong = report_from_theta(Family.CASE1, theta)
    return strong, weak_report(units.mass * I**2 / (2.0 * (E - v_inf) * units.hbar**2), theta)


def weak_report(w, theta) -> BoundReport:
    """T >= 1 - w, R <= w, clamped to [0, 1]; vacuous once w >= 1."""
    T_floor = min(1.0, max(0.0, 1.0 - w))
    R_cap = min(1.0, max(0.0, w))
    vacuous = T_floor <= 0.0
    return BoundReport(
        family=Family.CASE1_WEAK.value,
        theta_integral=theta,
        alpha_cap=math.inf if vacuous else 1.0 / math.sqrt(T_floor),
        beta_cap=math.inf if vacuous else math.sqrt(R_cap / T_floor),
        T_floor=T_floor,
        R_cap=R_cap,
        validity="vacuous" if vacuous else "valid",
    )


def case2_bound(pot: Potential, units: UnitsConfig = DEFAULT_UNITS, E: float = 1.0) -> BoundReport:
    """theta = (1/2) integral |k'|/k, i.e. the WKB-phase quadrature."""
    return general_bound(pot, units, E, PhaseVariant.WKB, family=Family.CASE2)


def monotonic_bound(k_minus, k_plus) -> BoundReport:
    """Step-function values: T >= 4 k+ k- / (k+ + k-)^2."""
    return report_from_pair(Family.CASE2A, k_plus, k_minus)


def single_extremum_bound(k_minus, k_plus, k_ext) -> BoundReport:
    family = Family.CASE2B if k_minus == k_plus else Family.CASE2B_ASYM
    return report_from_pair(family, k_ext**2, k_plus * k_minus)


def symmetric_extremum_caps(E, V_ext, V_inf):
    """(T_floor, R_cap) written with energies for a symmetric single-extremum potential."""
    num = (V_ext - V_inf) ** 2
    den = (2.0 * E - V_ext - V_inf) ** 2
    return 1.0 - num / den, num / den


def multi_extrema_bound(profile: ExtremaProfile) -> BoundReport:
    km, kp = profile.k_minus_inf, profile.k_plus_inf
    ex = profile.extrema
    if len(ex) == 0:
        return monotonic_bound(km, kp)
    if len(ex) == 1:
        return single_extremum_bound(km, kp, ex[0].k)
    pi_p = math.prod(e.k for e in ex if e.kind == "peak")
    pi_v = math.prod(e.k for e in ex if e.kind == "valley")
    first, last = ex[0].kind, ex[-1].kind
    # a missing outer peak is supplied by the asymptote it sinks to
    if first == "valley":
        pi_p *= km
    if last == "valley":
        pi_p *= kp
    return report_from_pair(Family.CASE2C, pi_p**2, km * kp * pi_v**2)


def profile_bound(pot, units, E) -> BoundReport:
    return multi_extrema_bound(find_extrema(pot, units, E))


def crossover_energy(pot: Potential, V_ext, units: UnitsConfig = DEFAULT_UNITS):
    """Energy scale beyond which the single-extremum bound beats Case 1."""
    I = l1_shifted_norm(pot, pot.v_plus_inf)
    return units.hbar**2 * (V_ext - pot.v_plus_inf) ** 2 / (2.0 * units.mass * I**2)


def admissible_bounds(pot: Potential, units: UnitsConfig = DEFAULT_UNITS, E: float = 1.0):
    """Every family whose preconditions hold at this energy."""
    reports = []
    if pot.symmetric_asymptotes and E > pot.v_plus_inf:
        reports.append(general_bound(pot, units, E, PhaseVariant.CONSTANT_K))
        reports.extend(case1_bound(pot, units, E))
    over_barrier = (not pot.spikes) and E > pot.max_value()
    if over_barrier:
        if not pot.symmetric_asymptotes:
            reports.append(general_bound(pot, units, E, PhaseVariant.WKB))
        reports.append(case2_bound(pot, units, E))
        try:
            reports.append(profile_bound(pot, units, E))
        except TurningPoint:
            pass
    return reports
