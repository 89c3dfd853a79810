"""Coupled first-order integrator for position-dependent Bogolubov coefficients.

The wavefunction is written as

    psi = (a e^{+i phi} + b e^{-i phi}) / sqrt(phi'),
    psi' = i sqrt(phi') (a e^{+i phi} - b e^{-i phi}),

and (a, b) are evolved from the right edge of the domain, where the Jost
solution is purely right-moving, (a, b) = (1, 0), back to the left edge, where
(a, b) = (alpha, beta).
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate

from .errors import (AsymmetricAsymptotes, NoPropagatingMode, PhaseDerivativeZero,
                     ToleranceNotMet, TurningPoint)
from .potentials import DEFAULT_UNITS, Potential, UnitsConfig, asymptotic_wavenumbers

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
COMPLEX_J = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


class PhaseVariant(str, Enum):
    CONSTANT_K = "constant_k"
    WKB = "wkb"


@dataclass(frozen=True)
class Tolerances:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 0.1
    max_residual: float = 1e-6
    method: str = "DOP853"

    def tightened(self, factor):
        return Tolerances(self.rtol / factor, self.atol / factor, self.max_step,
                          self.max_residual, self.method)


class PhaseFunction:
    """Auxiliary phase along the domain.

    ConstantK uses phi = k_inf x. WKB uses phi' = k(x) with
    phi(x_hi) = k_{+inf} x_hi so both variants agree at the right edge.
    """

    def __init__(self, pot: Potential, units: UnitsConfig, E: float, variant):
        self.pot = pot
        self.units = units
        self.E = float(E)
        self.variant = PhaseVariant(variant)
        self.c = units.ksq_per_energy
        self.k_minus, self.k_plus = asymptotic_wavenumbers(pot, units, E)
        if self.variant is PhaseVariant.CONSTANT_K:
            if not pot.symmetric_asymptotes:
                raise AsymmetricAsymptotes(
                    "constant-k phase needs equal asymptotes",
                    v_minus_inf=pot.v_minus_inf, v_plus_inf=pot.v_plus_inf)
            self.k_inf = self.k_plus
            self.k_max = self.k_inf
        else:
            vmax = pot.max_value()
            if vmax >= E:
                raise TurningPoint("WKB phase needs E above the potential everywhere",
                                   E=E, V_max=vmax)
            self.k_max = math.sqrt(self.c * (E - min(pot.sample(
                np.linspace(pot.x_lo, pot.x_hi, 2048)).min(), pot.v_minus_inf, pot.v_plus_inf)))

    def ksq(self, x):
        return self.c * (self.E - float(self.pot.evaluate(x)))

    def dphi(self, x):
        if self.variant is PhaseVariant.CONSTANT_K:
            return self.k_inf
        k2 = self.ksq(x)
        if k2 <= 0:
            raise TurningPoint("k^2 <= 0 inside the domain", x=x, E=self.E)
        return math.sqrt(k2)

    def ddphi(self, x):
        if self.variant is PhaseVariant.CONSTANT_K:
            return 0.0
        return -self.c * float(self.pot.dV(x)) / (2.0 * self.dphi(x))

    def dphi_sided(self, x0, side):
        if self.variant is PhaseVariant.CONSTANT_K:
            return self.k_inf
        return math.sqrt(self.c * (self.E - float(self.pot.one_sided(x0, side))))

    def phi(self, x):
        if self.variant is PhaseVariant.CONSTANT_K:
            return self.k_inf * x
        hi = self.pot.x_hi
        total = self.k_plus * hi
        lo, up, sign = (x, hi, -1.0) if x < hi else (hi, x, 1.0)
        edges = [lo, *[p for p in self.pot.interfaces() if lo < p < up], up]
        for a, b in zip(edges[:-1], edges[1:]):
            val, _ = sp_integrate.quad(lambda y: self.dphi(min(max(y, a), b)), a, b,
                                       epsabs=1e-13, epsrel=1e-13, limit=400)
            total += sign * val
        return total

    def max_step(self, tol: Tolerances):
        return min(tol.max_step, math.pi / (10.0 * self.k_max))


def make_phase(pot, units, E, variant) -> PhaseFunction:
    return PhaseFunction(pot, units, E, variant)


@dataclass(frozen=True)
class BogolubovState:
    x: float
    a: complex
    b: complex
    phi: Optional[float] = None

    @property
    def conservation(self):
        return abs(self.a) ** 2 - abs(self.b) ** 2


@dataclass(frozen=True)
class ScatteringResult:
    alpha: complex
    beta: complex
    T: float
    R: float
    conservation_residual: float
    phase_variant: PhaseVariant
    energy: float
    error_estimate: float
    n_steps: int
    states: tuple = ()

    @property
    def particle_number(self):
        """|beta|^2, the produced quanta per mode in the oscillator reading."""
        return abs(self.beta) ** 2


@dataclass(frozen=True)
class TransferMatrix:
    matrix: np.ndarray
    x_i: float
    x_f: float

    @property
    def det(self):
        return complex(np.linalg.det(self.matrix))

    def su11_residual(self):
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ SIGMA_Z @ m - SIGMA_Z)))

    def inverse_residual(self):
        """|E^{-1} - sigma_z E^dagger sigma_z|, the SU(1,1) inverse identity."""
        m = self.matrix
        return float(np.max(np.abs(np.linalg.inv(m) - SIGMA_Z @ m.conj().T @ SIGMA_Z)))

    def __matmul__(self, other):
        return TransferMatrix(self.matrix @ other.matrix, other.x_i, self.x_f)


def sz_rhs_values(a, b, phi, dphi, ddphi, ksq):
    if dphi == 0:
        raise PhaseDerivativeZero("phi' vanishes")
    em = cmath.exp(-2j * phi)
    ep = em.conjugate()
    q = ksq - dphi * dphi
    inv = 1.0 / (2.0 * dphi)
    da = inv * (ddphi * b * em + 1j * q * (a + b * em))
    db = inv * (ddphi * a * ep - 1j * q * (b + a * ep))
    return da, db


def sz_rhs(state: BogolubovState, phase: PhaseFunction, ksq: Optional[float] = None):
    """(da/dx, db/dx) at ``state`` for the given phase."""
    x = state.x
    phi = state.phi if state.phi is not None else phase.phi(x)
    k2 = phase.ksq(x) if ksq is None else ksq
    return sz_rhs_values(state.a, state.b, phi, phase.dphi(x), phase.ddphi(x), k2)


def _make_rhs(phase: PhaseFunction, seg_lo, seg_hi, ncols):
    pot = phase.pot
    V = pot.evaluate
    dV = pot.dV
    c, E = phase.c, phase.E
    pad = 1e-12 * max(1.0, abs(seg_lo), abs(seg_hi))
    lo, hi = seg_lo + pad, seg_hi - pad
    exp = cmath.exp

    if phase.variant is PhaseVariant.CONSTANT_K:
        k = phase.k_inf
        vinf = pot.v_plus_inf

        def rhs(x, y):
            xc = lo if x < lo else hi if x > hi else x
            q = -c * (float(V(xc)) - vinf) / (2.0 * k)
            em = exp(-2j * k * x)
            ep = em.conjugate()
            out = np.empty_like(y)
            for j in range(ncols):
                a, b = y[2 * j], y[2 * j + 1]
                out[2 * j] = 1j * q * (a + b * em)
                out[2 * j + 1] = -1j * q * (b + a * ep)
            out[-1] = k
            return out
    else:
        def rhs(x, y):
            xc = lo if x < lo else hi if x > hi else x
            k2 = c * (E - float(V(xc)))
            if k2 <= 0:
                raise TurningPoint("k^2 <= 0 during integration", x=x, E=E)
            k = math.sqrt(k2)
            g = -c * float(dV(xc)) / (4.0 * k2)  # phi'' / (2 phi')
            em = exp(-2j * y[-1].real)
            ep = em.conjugate()
            out = np.empty_like(y)
            for j in range(ncols):
                a, b = y[2 * j], y[2 * j + 1]
                out[2 * j] = g * b * em
                out[2 * j + 1] = g * a * ep
            out[-1] = k
            return out

    return rhs


def _basis_matrix(phi, dphi):
    """Maps (a, b) to (psi, psi') at a point."""
    s = math.sqrt(dphi)
    ep = cmath.exp(1j * phi)
    em = 1.0 / ep
    return np.array([[ep / s, em / s], [1j * s * ep, -1j * s * em]])


def interface_matrix(phase: PhaseFunction, x0, direction):
    """(a, b) just past x0 in ``direction`` (+1 rightwards, -1 leftwards) from (a, b) before it."""
    phi = phase.phi(x0) if phase.variant is PhaseVariant.WKB else phase.k_inf * x0
    return _interface_matrix_at(phase, x0, phi, direction)


def _interface_matrix_at(phase, x0, phi, direction):
    pot = phase.pot
    jump = phase.c * sum(s.strength for s in pot.spikes if s.location == x0)
    P_left = _basis_matrix(phi, phase.dphi_sided(x0, -1))
    P_right = _basis_matrix(phi, phase.dphi_sided(x0, +1))
    # psi'_right - psi'_left = (2m/hbar^2) strength psi
    D = np.array([[1.0, 0.0], [jump, 1.0]], dtype=complex)
    if direction > 0:
        return np.linalg.solve(P_right, D @ P_left)
    return np.linalg.solve(P_left, np.linalg.solve(D, P_right))


def _propagate(phase: PhaseFunction, cols: np.ndarray, x_from, x_to, phi_from,
               tol: Tolerances, record=False):
    """Carry the columns of ``cols`` (2 x n) from x_from to x_to.

    Returns (cols_out, phi_out, states, residual, n_steps). ``states`` records
    the first column at every accepted step when ``record`` is set.
    """
    cols = np.array(cols, dtype=complex)
    ncols = cols.shape[1]
    direction = 1.0 if x_to >= x_from else -1.0
    lo, hi = min(x_from, x_to), max(x_from, x_to)
    # interior interfaces in the order they are crossed
    cuts = [p for p in phase.pot.interfaces() if lo < p < hi]
    cuts = cuts if direction > 0 else cuts[::-1]
    nodes = [x_from, *cuts, x_to]

    ref = np.array([abs(cols[0, j]) ** 2 - abs(cols[1, j]) ** 2 for j in range(ncols)])
    phi = float(phi_from)
    states = []
    residual = 0.0
    n_steps = 0
    max_step = phase.max_step(tol)

    def conservation(y):
        r = 0.0
        for j in range(ncols):
            cur = abs(y[2 * j]) ** 2 - abs(y[2 * j + 1]) ** 2
            r = max(r, abs(cur - ref[j]))
        return r

    if record:
        states.append(BogolubovState(x_from, complex(cols[0, 0]), complex(cols[1, 0]), phi))

    for k, (s0, s1) in enumerate(zip(nodes[:-1], nodes[1:])):
        if k > 0:
            M = _interface_matrix_at(phase, s0, phi, direction)
            cols = M @ cols
            if record:
                states.append(BogolubovState(s0, complex(cols[0, 0]), complex(cols[1, 0]), phi))
        if s0 == s1:
            continue
        y0 = np.empty(2 * ncols + 1, dtype=complex)
        y0[0:-1:2] = cols[0]
        y0[1:-1:2] = cols[1]
        y0[-1] = phi
        rhs = _make_rhs(phase, min(s0, s1), max(s0, s1), ncols)
        sol = sp_integrate.solve_ivp(rhs, (s0, s1), y0, method=tol.method, rtol=tol.rtol,
                                     atol=tol.atol, max_step=max_step)
        if sol.status != 0:
            raise ToleranceNotMet(f"integrator failed: {sol.message}", segment=(s0, s1))
        Y = sol.y
        n_steps += Y.shape[1] - 1
        for i in range(Y.shape[1]):
            residual = max(residual, conservation(Y[:, i]))
        if record:
            for i in range(1, Y.shape[1]):
                states.append(BogolubovState(float(sol.t[i]), complex(Y[0, i]),
                                             complex(Y[1, i]), float(Y[-1, i].real)))
        yf = Y[:, -1]
        cols = np.vstack([yf[0:-1:2], yf[1:-1:2]])
        phi = float(yf[-1].real)
    residual = max(residual, conservation(np.append(np.ravel(cols, order="F"), phi)))
    if residual > tol.max_residual:
        raise ToleranceNotMet("conservation residual above limit", residual=residual,
                              limit=tol.max_residual)
    return cols, phi, states, residual, n_steps


def integrate(pot: Potential, units: UnitsConfig = DEFAULT_UNITS, E: float = 1.0,
              phase_variant=PhaseVariant.CONSTANT_K, tolerances: Tolerances = Tolerances(),
              keep_states=False) -> ScatteringResult:
    phase = make_phase(pot, units, E, phase_variant)
    start = np.array([[1.0], [0.0]], dtype=complex)
    phi_hi = phase.k_plus * pot.x_hi
    cols, _, states, residual, n_steps = _propagate(
        phase, start, pot.x_hi, pot.x_lo, phi_hi, tolerances, record=keep_states)
    alpha, beta = complex(cols[0, 0]), complex(cols[1, 0])
    T = 1.0 / abs(alpha) ** 2
    R = abs(beta) ** 2 / abs(alpha) ** 2
    err = 10.0 * residual * T + 1e-14
    return ScatteringResult(alpha, beta, T, R, residual, PhaseVariant(phase_variant),
                            float(E), err, n_steps, tuple(states))


def transfer_matrix(pot: Potential, units: UnitsConfig, E: float, phase_variant,
                    x_i: float, x_f: float, tolerances: Tolerances = Tolerances()) -> TransferMatrix:
    """Matrix taking (a, b) at x_i to (a, b) at x_f."""
    phase = make_phase(pot, units, E, phase_variant)
    eye = np.eye(2, dtype=complex)
    if x_i == x_f:
        return TransferMatrix(eye, x_i, x_f)
    cols, _, _, _, _ = _propagate(phase, eye, x_i, x_f, phase.phi(x_i), tolerances)
    return TransferMatrix(cols, x_i, x_f)


def full_line_matrix(pot, units, E, phase_variant, tolerances=Tolerances()):
    """[[alpha, beta*], [beta, alpha*]]: the map from the right edge to the left edge."""
    return transfer_matrix(pot, units, E, phase_variant, pot.x_hi, pot.x_lo, tolerances)


def reconstruct_wavefunction(states: Sequence[BogolubovState], phase: PhaseFunction):
    """Sampled (x, psi, psi') from integration states."""
    xs = np.array([s.x for s in states])
    psi = np.empty(len(states), dtype=complex)
    dpsi = np.empty(len(states), dtype=complex)
    for i, s in enumerate(states):
        phi = s.phi if s.phi is not None else phase.phi(s.x)
        w = phase.dphi(s.x)
        ep = cmath.exp(1j * phi)
        em = 1.0 / ep
        psi[i] = (s.a * ep + s.b * em) / math.sqrt(w)
        dpsi[i] = 1j * math.sqrt(w) * (s.a * ep - s.b * em)
    return xs, psi, dpsi


def write_trace(states: Sequence[BogolubovState], stream):
    """Per-step CSV: x, Re a, Im a, Re b, Im b, conservation residual."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "re_a", "im_a", "re_b", "im_b", "residual"])
    for s in states:
        w.writerow([repr(float(s.x)), repr(s.a.real), repr(s.a.imag), repr(s.b.real),
                    repr(s.b.imag), repr(abs(s.conservation - 1.0))])
