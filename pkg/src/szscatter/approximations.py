"""First-order estimates of beta.

All three estimates use the engine's normalisation: (a, b) = (1, 0) at the
right edge and beta read off at the left edge. In that convention the
leading-order solution of db/dx = (...) a is beta = -integral of the source,
which is why every estimate below carries an overall minus sign.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .engine import PhaseVariant, make_phase
from .errors import AsymmetricAsymptotes, NoPropagatingMode, TurningPoint
from .potentials import DEFAULT_UNITS, Potential, UnitsConfig
from .quadrature import gauss_kronrod, panel_edges, panel_nodes, tail_integrals

PANELS_PER_PERIOD = 8


class Method(str, Enum):
    BORN = "Born"
    DISTORTED_BORN = "DistortedBorn"
    ABOVE_BARRIER = "AboveBarrier"


@dataclass(frozen=True)
class BetaEstimate:
    method: str
    beta: complex

    @property
    def magnitude(self):
        return abs(self.beta)


def _symmetric_setup(pot: Potential, units: UnitsConfig, E):
    if not pot.symmetric_asymptotes:
        raise AsymmetricAsymptotes("Born estimates need V(-inf) == V(+inf)",
                                   v_minus_inf=pot.v_minus_inf, v_plus_inf=pot.v_plus_inf)
    v_inf = pot.v_plus_inf
    if E <= v_inf:
        raise NoPropagatingMode("E must exceed V_inf", E=E, v_inf=v_inf)
    k = math.sqrt(units.ksq(E - v_inf))
    coupling = units.mass / (units.hbar**2 * k)
    return v_inf, k, coupling


def _panels(pot, k):
    """Panels no wider than 1/8 of the period of exp(2ikx)."""
    width = math.pi / k / PANELS_PER_PERIOD
    return panel_edges(pot.x_lo, pot.x_hi, width, breaks=pot.interfaces())


def born_beta(pot: Potential, units: UnitsConfig = DEFAULT_UNITS, E: float = 1.0) -> BetaEstimate:
    """beta ~ -(i m / hbar^2 k) * Fourier transform of V - V_inf at 2k."""
    v_inf, k, coupling = _symmetric_setup(pot, units, E)
    f = lambda x: (pot.sample(x) - v_inf) * np.exp(2j * k * x)
    total, _ = gauss_kronrod(f, pot.x_lo, pot.x_hi, math.pi / k / PANELS_PER_PERIOD,
                             breaks=pot.interfaces())
    total += sum(s.strength * cmath.exp(2j * k * s.location) for s in pot.spikes)
    return BetaEstimate(Method.BORN.value, complex(-1j * coupling * total))


def distorted_born_beta(pot: Potential, units: UnitsConfig = DEFAULT_UNITS,
                        E: float = 1.0) -> BetaEstimate:
    """Born integrand dressed with the local phase shift.

    With S(x) = (m / hbar^2 k) * integral from x_hi to x of (V - V_inf), the
    diagonal terms are removed exactly and

        beta ~ -(i m / hbar^2 k) e^{i S(x_lo)} integral (V - V_inf) e^{2ikx - 2iS(x)} dx.
    """
    v_inf, k, coupling = _symmetric_setup(pot, units, E)
    dv = lambda x: pot.sample(x) - v_inf
    edges = _panels(pot, k)
    x, wk, _ = panel_nodes(edges)

    # walk panels right to left carrying S; spikes sit on panel edges
    dvx = dv(x)
    panel_int = np.sum(wk * dvx, axis=1)
    tails = tail_integrals(dv, x, edges[1:])
    spikes = {s.location: s.strength for s in pot.spikes}
    S = np.empty_like(x)
    total = 0j
    S_cur = 0.0
    for i in range(len(edges) - 2, -1, -1):
        S[i] = S_cur - coupling * tails[i]
        S_cur -= coupling * panel_int[i]
        strength = spikes.get(edges[i])
        if strength is not None:
            # phase held at its mid-spike value across the spike
            S_mid = S_cur - 0.5 * coupling * strength
            total += strength * cmath.exp(2j * k * edges[i] - 2j * S_mid)
            S_cur -= coupling * strength
    total += np.sum(wk * dvx * np.exp(2j * k * x - 2j * S))
    S_lo = S_cur
    return BetaEstimate(Method.DISTORTED_BORN.value,
                        complex(-1j * coupling * cmath.exp(1j * S_lo) * total))


def above_barrier_beta(pot: Potential, units: UnitsConfig = DEFAULT_UNITS,
                       E: float = 1.0) -> BetaEstimate:
    """beta ~ -(1/2) integral (k'/k) exp(2 i phi(x)) dx with phi' = k.

    phi is anchored at phi(x_hi) = k_{+inf} x_hi like the WKB integration.
    Jumps in V contribute -(1/2) ln(k_R / k_L) exp(2 i phi(x0)).
    """
    if pot.spikes:
        raise TurningPoint("delta spikes are infinite barriers", spikes=len(pot.spikes))
    phase = make_phase(pot, units, E, PhaseVariant.WKB)
    c = units.ksq_per_energy
    ksq = lambda x: c * (E - pot.sample(x))
    kfun = lambda x: np.sqrt(ksq(x))
    edges = panel_edges(pot.x_lo, pot.x_hi, math.pi / phase.k_max / PANELS_PER_PERIOD,
                        breaks=pot.interfaces())
    x, wk, _ = panel_nodes(edges)
    n = len(edges) - 1
    phi_edge = np.zeros(n + 1)
    phi_edge[n] = phase.k_plus * pot.x_hi
    panel_int = np.sum(wk * kfun(x), axis=1)
    for i in range(n - 1, -1, -1):
        phi_edge[i] = phi_edge[i + 1] - panel_int[i]
    phi = phi_edge[1:, None] - tail_integrals(kfun, x, edges[1:])

    dV = pot.sample_dV(x)
    k_log_deriv = -c * dV / (2.0 * ksq(x))
    total = np.sum(wk * k_log_deriv * np.exp(2j * phi))
    for x0 in pot.breakpoints:
        i = int(np.searchsorted(edges, x0))
        jump = math.log(phase.dphi_sided(x0, +1) / phase.dphi_sided(x0, -1))
        total += jump * cmath.exp(2j * phi_edge[i])
    return BetaEstimate(Method.ABOVE_BARRIER.value, complex(-0.5 * total))


ESTIMATORS = {
    Method.BORN: born_beta,
    Method.DISTORTED_BORN: distorted_born_beta,
    Method.ABOVE_BARRIER: above_barrier_beta,
}
