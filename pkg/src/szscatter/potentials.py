"""Potentials, units and the wavenumber functionals built on them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import NoPropagatingMode, NonAlternatingProfile, NonDecayingTail, TurningPoint

DEFAULT_TAIL_TOLERANCE = 1e-10
DEFAULT_GRID = 4096
FD_STEP = 1e-5


@dataclass(frozen=True)
class UnitsConfig:
    """hbar and mass. The default (hbar=1, m=1/2) makes k^2 = E - V."""

    hbar: float = 1.0
    mass: float = 0.5

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError(f"hbar and mass must be positive, got {self}")

    @property
    def ksq_per_energy(self) -> float:
        return 2.0 * self.mass / self.hbar**2

    def ksq(self, energy_gap):
        return self.ksq_per_energy * energy_gap

    def energy_of_k(self, k):
        return k * k / self.ksq_per_energy


DEFAULT_UNITS = UnitsConfig()


@dataclass(frozen=True)
class DeltaSpike:
    location: float
    strength: float


@dataclass(frozen=True)
class Potential:
    """A real potential that is flat outside ``domain``.

    ``breakpoints`` lists jump discontinuities of V. ``derivative`` is dV/dx;
    when absent it is approximated by central differences.
    """

    evaluate: Callable[[float], float]
    v_minus_inf: float
    v_plus_inf: float
    domain: tuple
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    derivative: Optional[Callable[[float], float]] = None
    spikes: tuple = ()
    breakpoints: tuple = ()
    name: str = "custom"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")
        if self.tail_tolerance <= 0:
            raise ValueError("tail_tolerance must be positive")
        object.__setattr__(self, "domain", (float(lo), float(hi)))
        object.__setattr__(self, "spikes", tuple(sorted(self.spikes, key=lambda s: s.location)))
        object.__setattr__(self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints)))
        for s in self.spikes:
            if not lo < s.location < hi:
                raise ValueError(f"spike at {s.location} outside open domain {self.domain}")
        for b in self.breakpoints:
            if not lo < b < hi:
                raise ValueError(f"breakpoint {b} outside open domain {self.domain}")

    def __call__(self, x):
        return self.evaluate(x)

    @property
    def x_lo(self):
        return self.domain[0]

    @property
    def x_hi(self):
        return self.domain[1]

    @property
    def symmetric_asymptotes(self):
        return self.v_minus_inf == self.v_plus_inf

    def interfaces(self):
        """Sorted positions where the engine must splice segments."""
        pts = set(self.breakpoints) | {s.location for s in self.spikes}
        return sorted(pts)

    def segments(self):
        edges = [self.x_lo, *self.interfaces(), self.x_hi]
        return list(zip(edges[:-1], edges[1:]))

    def dV(self, x):
        if self.derivative is not None:
            return self.derivative(x)
        return (self.evaluate(x + FD_STEP) - self.evaluate(x - FD_STEP)) / (2 * FD_STEP)

    def one_sided(self, x0, side):
        """Limit of V at x0 from the left (side=-1) or right (side=+1)."""
        eps = 1e-9 * max(1.0, abs(x0))
        return self.evaluate(x0 + side * eps)

    def sample(self, xs):
        xs = np.asarray(xs, dtype=float)
        try:
            vs = np.asarray(self.evaluate(xs), dtype=float)
            if vs.shape == xs.shape:
                return vs
        except Exception:
            pass
        return np.array([self.evaluate(float(x)) for x in xs])

    def sample_dV(self, xs):
        xs = np.asarray(xs, dtype=float)
        try:
            ds = np.asarray(self.dV(xs), dtype=float)
            if ds.shape == xs.shape:
                return ds
        except Exception:
            pass
        return np.vectorize(lambda x: float(self.dV(float(x))))(xs)

    def check_tails(self, v_ref_lo=None, v_ref_hi=None):
        v_ref_lo = self.v_minus_inf if v_ref_lo is None else v_ref_lo
        v_ref_hi = self.v_plus_inf if v_ref_hi is None else v_ref_hi
        gap_lo = abs(self.evaluate(self.x_lo) - v_ref_lo)
        gap_hi = abs(self.evaluate(self.x_hi) - v_ref_hi)
        if gap_lo > self.tail_tolerance or gap_hi > self.tail_tolerance:
            raise NonDecayingTail(
                "potential not flat at truncation points",
                potential=self.name, gap_lo=gap_lo, gap_hi=gap_hi,
                tolerance=self.tail_tolerance,
            )

    def shifted(self, c):
        """The potential translated by x -> x + c, i.e. V_new(x) = V(x - c)."""
        f = self.evaluate
        d = self.derivative
        return replace(
            self,
            evaluate=lambda x: f(x - c),
            derivative=None if d is None else (lambda x: d(x - c)),
            domain=(self.x_lo + c, self.x_hi + c),
            spikes=tuple(DeltaSpike(s.location + c, s.strength) for s in self.spikes),
            breakpoints=tuple(b + c for b in self.breakpoints),
            name=f"{self.name}+shift",
        )

    def max_value(self, n=DEFAULT_GRID):
        xs = np.linspace(self.x_lo, self.x_hi, n)
        vs = self.sample(xs)
        vmax = float(np.max(vs))
        for b in self.breakpoints:
            vmax = max(vmax, self.one_sided(b, -1), self.one_sided(b, +1))
        return max(vmax, self.v_minus_inf, self.v_plus_inf)


def constant_potential(value=0.0, domain=(-1.0, 1.0), spikes=()):
    return Potential(
        evaluate=lambda x: value + 0.0 * np.asarray(x, dtype=float),
        derivative=lambda x: 0.0 * np.asarray(x, dtype=float),
        v_minus_inf=value, v_plus_inf=value, domain=domain,
        spikes=tuple(spikes), name="constant", params={"value": value},
    )


def wavenumber(pot: Potential, units: UnitsConfig, E: float, x: float) -> float:
    if not (math.isfinite(E) and math.isfinite(x)):
        raise ValueError("E and x must be finite")
    gap = E - pot.evaluate(x)
    if gap < 0:
        raise TurningPoint("E below V(x)", x=x, E=E, V=E - gap)
    return math.sqrt(units.ksq(gap))


def asymptotic_wavenumbers(pot: Potential, units: UnitsConfig, E: float):
    if E <= max(pot.v_minus_inf, pot.v_plus_inf):
        raise NoPropagatingMode(
            "energy not above both asymptotes",
            E=E, v_minus_inf=pot.v_minus_inf, v_plus_inf=pot.v_plus_inf,
        )
    return (
        math.sqrt(units.ksq(E - pot.v_minus_inf)),
        math.sqrt(units.ksq(E - pot.v_plus_inf)),
    )


@dataclass(frozen=True)
class Extremum:
    position: float
    k: float
    kind: str  # "peak" or "valley" of k(x); a V-peak is a k-valley

    @property
    def is_peak(self):
        return self.kind == "peak"


@dataclass(frozen=True)
class ExtremaProfile:
    extrema: tuple
    k_minus_inf: float
    k_plus_inf: float

    def __post_init__(self):
        kinds = [e.kind for e in self.extrema]
        for k1, k2 in zip(kinds, kinds[1:]):
            if k1 == k2:
                raise NonAlternatingProfile("extrema kinds must alternate", kinds=kinds)
        if self.k_minus_inf <= 0 or self.k_plus_inf <= 0:
            raise NoPropagatingMode("asymptotic wavenumbers must be positive")

    def __len__(self):
        return len(self.extrema)

    @property
    def kinds(self):
        return [e.kind for e in self.extrema]


def _runs(vs):
    """Collapse consecutive equal values; returns (value, first, last) triples."""
    runs = []
    start = 0
    for i in range(1, len(vs) + 1):
        if i == len(vs) or vs[i] != vs[start]:
            runs.append((vs[start], start, i - 1))
            start = i
    return runs


def find_extrema(pot: Potential, units: UnitsConfig, E: float, n_grid: int = DEFAULT_GRID,
                 xtol: float = 1e-10) -> ExtremaProfile:
    """Alternating peaks/valleys of k(x) by grid scan plus bounded Brent refinement."""
    k_lo, k_hi = asymptotic_wavenumbers(pot, units, E)
    xs = np.linspace(pot.x_lo, pot.x_hi, n_grid)
    # breakpoints are sampled on both sides so jumps show up as steps
    extra = []
    for b in pot.breakpoints:
        eps = 1e-9 * max(1.0, abs(b))
        extra += [b - eps, b + eps]
    if extra:
        xs = np.sort(np.concatenate([xs, extra]))
    vs = pot.sample(xs)
    if np.any(vs >= E):
        i = int(np.argmax(vs))
        raise TurningPoint("sampled V(x) >= E", x=float(xs[i]), V=float(vs[i]), E=E)

    scale = max(float(np.max(np.abs(vs - E))), 1e-300)
    prune = 1e-12 * scale
    runs = _runs(vs)
    raw = []  # (position, V, kind-in-V)
    for j in range(1, len(runs) - 1):
        v, a, b = runs[j]
        left, right = runs[j - 1][0], runs[j + 1][0]
        if v > left and v > right:
            kind = "max"
        elif v < left and v < right:
            kind = "min"
        else:
            continue
        sign = -1.0 if kind == "max" else 1.0
        if b - a <= 2:
            # isolated extremum (possibly straddled by two equal samples): refine
            # bounded search: scalar and vectorised evaluation may differ by an ulp,
            # so a strict three-point bracket is not guaranteed on flat runs
            lo_x, hi_x = xs[max(a - 1, 0)], xs[min(b + 1, len(xs) - 1)]
            res = optimize.minimize_scalar(
                lambda x: sign * float(pot.evaluate(x)),
                bounds=(lo_x, hi_x), method="bounded", options={"xatol": xtol},
            )
            pos = float(res.x)
        else:
            pos = float(0.5 * (xs[a] + xs[b]))
        val = float(pot.evaluate(pos))
        if sign * val > sign * v:
            pos, val = float(xs[a]), float(v)
        raw.append([pos, val, kind])

    # drop numerically insignificant wiggles
    seq = [[None, pot.v_minus_inf, None], *raw, [None, pot.v_plus_inf, None]]
    while len(seq) > 2:
        gaps = [abs(seq[i + 1][1] - seq[i][1]) for i in range(len(seq) - 1)]
        i = int(np.argmin(gaps))
        if gaps[i] >= prune:
            break
        if i == 0:
            del seq[1]
        elif i == len(seq) - 2:
            del seq[i]
        else:
            del seq[i:i + 2]

    extrema = []
    for pos, val, kind in seq[1:-1]:
        if val >= E:
            raise TurningPoint("extremum reaches E", x=pos, V=val, E=E)
        k = math.sqrt(units.ksq(E - val))
        extrema.append(Extremum(pos, k, "valley" if kind == "max" else "peak"))
    return ExtremaProfile(tuple(extrema), k_lo, k_hi)


def _chunked_quad(f, lo, hi, points=(), n_chunks=32, epsabs=1e-13, epsrel=1e-11):
    edges = np.linspace(lo, hi, n_chunks + 1)
    total = 0.0
    pts = sorted(p for p in points if lo < p < hi)
    for a, b in zip(edges[:-1], edges[1:]):
        inner = [p for p in pts if a < p < b]
        with warnings.catch_warnings():
            # finite-difference integrands have a roundoff floor above epsabs
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, a, b, points=inner or None, limit=200,
                                    epsabs=epsabs, epsrel=epsrel)
        total += val
    return total


def _sign_changes(f, lo, hi, n=DEFAULT_GRID, vec=None):
    """Roots of f on a uniform scan; ``vec`` is an optional vectorised f for the scan."""
    xs = np.linspace(lo, hi, n)
    fs = np.asarray(vec(xs), float) if vec is not None else np.array([f(x) for x in xs])
    roots = []
    for i in range(n - 1):
        if fs[i] == 0.0:
            roots.append(xs[i])
        elif fs[i] * fs[i + 1] < 0:
            roots.append(optimize.brentq(f, xs[i], xs[i + 1], xtol=1e-13))
    return roots


def l1_shifted_norm(pot: Potential, v_ref: float) -> float:
    """Integral of |V - v_ref| over the domain plus total |spike strength|."""
    pot.check_tails(v_ref, v_ref)
    total = 0.0
    for a, b in pot.segments():
        g = lambda x: float(pot.evaluate(x)) - v_ref
        pts = _sign_changes(g, a, b, n=max(64, DEFAULT_GRID // max(1, len(pot.segments()))),
                            vec=lambda xs: pot.sample(xs) - v_ref)
        total += _chunked_quad(lambda x: abs(g(x)), a, b, points=pts)
    return total + sum(abs(s.strength) for s in pot.spikes)


def gaussian_sum_potential(amplitudes: Sequence[float], centers: Sequence[float],
                           widths: Sequence[float], tail_tolerance=DEFAULT_TAIL_TOLERANCE,
                           name="gaussian_sum"):
    """V(x) = sum_i A_i exp(-((x - c_i)/w_i)^2); asymptotes are zero."""
    A = np.asarray(amplitudes, float)
    c = np.asarray(centers, float)
    w = np.asarray(widths, float)
    reach = np.sqrt(np.log(np.maximum(np.abs(A) * len(A) / tail_tolerance, 2.0)))
    lo = float(np.min(c - reach * w)) - 1.0
    hi = float(np.max(c + reach * w)) + 1.0

    terms = list(zip(A.tolist(), c.tolist(), w.tolist()))

    def V(x):
        if isinstance(x, float):
            # scalar fast path for adaptive quadrature
            return sum(a * math.exp(-((x - ci) / wi) ** 2) for a, ci, wi in terms)
        x = np.asarray(x, float)
        u = (x[..., None] - c) / w
        out = np.sum(A * np.exp(-u * u), axis=-1)
        return float(out) if out.ndim == 0 else out

    def dV(x):
        if isinstance(x, float):
            return sum(-2.0 * a * (x - ci) / wi**2 * math.exp(-((x - ci) / wi) ** 2)
                       for a, ci, wi in terms)
        x = np.asarray(x, float)
        u = (x[..., None] - c) / w
        out = np.sum(-2.0 * A * u / w * np.exp(-u * u), axis=-1)
        return float(out) if out.ndim == 0 else out

    return Potential(evaluate=V, derivative=dV, v_minus_inf=0.0, v_plus_inf=0.0,
                     domain=(lo, hi), tail_tolerance=tail_tolerance, name=name,
                     params={"amplitudes": A.tolist(), "centers": c.tolist(),
                             "widths": w.tolist()})
