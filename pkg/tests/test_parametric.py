import math

import numpy as np
import pytest

from szscatter import verify
from szscatter.bounds import case2_bound
from szscatter.engine import PhaseVariant, integrate
from szscatter.errors import AsymmetricAsymptotes, NonAlternatingProfile, TurningPoint
from szscatter.parametric import (FrequencyProfile, evolve, oscillator_case1_theta,
                                  oscillator_case2_theta, oscillator_monotonic_caps,
                                  oscillator_multi_extrema_caps, oscillator_single_extremum_caps,
                                  parametric_bounds, to_scattering)
from szscatter.potentials import DEFAULT_UNITS, UnitsConfig, wavenumber

ALT = UnitsConfig(hbar=0.7, mass=1.3)
DOMAIN = (-30.0, 30.0)


def sech2_profile(w0, a, width=1.0):
    return FrequencyProfile(lambda t: w0 * (1 + a / np.cosh(np.asarray(t) / width) ** 2), w0, w0,
                            DOMAIN,
                            d_omega=lambda t: -2 * w0 * a / width * np.tanh(np.asarray(t) / width)
                            / np.cosh(np.asarray(t) / width) ** 2)


def ramp_profile(w_minus, w_plus, width=1.0):
    mid, half = 0.5 * (w_minus + w_plus), 0.5 * (w_plus - w_minus)
    return FrequencyProfile(lambda t: mid + half * np.tanh(np.asarray(t) / width), w_minus, w_plus,
                            DOMAIN,
                            d_omega=lambda t: half / width / np.cosh(np.asarray(t) / width) ** 2)


def two_bump_profile():
    # dip, bump, dip: three interior extrema of omega
    w = lambda t: (1 - 0.3 / np.cosh(np.asarray(t) + 2.5) ** 2 + 0.4 / np.cosh(np.asarray(t)) ** 2
                   - 0.2 / np.cosh(np.asarray(t) - 2.5) ** 2)
    return FrequencyProfile(w, 1.0, 1.0, DOMAIN)


def test_constant_frequency():
    prof = FrequencyProfile(lambda t: 1.3 + 0.0 * np.asarray(t), 1.3, 1.3, (-5.0, 5.0))
    r = evolve(prof)
    assert r.alpha == pytest.approx(1.0, abs=1e-12)
    assert abs(r.beta) < 1e-12
    assert parametric_bounds(prof, "1").theta_integral == 0.0
    assert oscillator_case1_theta(prof) == 0.0
    assert oscillator_case2_theta(prof) == 0.0


@pytest.mark.parametrize("units", [DEFAULT_UNITS, ALT], ids=["default", "alt"])
def test_mapping_reproduces_omega(units):
    prof = sech2_profile(1.0, 0.3)
    prob = to_scattering(prof, units)
    for t in (-4.0, -0.3, 0.0, 1.7):
        assert wavenumber(prob.potential, units, prob.energy, t) == pytest.approx(
            float(prof.omega(t)), rel=1e-13)


def test_mapping_fidelity():
    prof = sech2_profile(1.0, 0.3)
    prob = to_scattering(prof)
    direct = integrate(prob.potential, prob.units, prob.energy, PhaseVariant.WKB)
    r = evolve(prof)
    assert r.alpha == direct.alpha and r.beta == direct.beta


def test_sech2_pulse_beta_below_case2_cap():
    prof = sech2_profile(1.0, 0.3)
    r = evolve(prof)
    theta = oscillator_case2_theta(prof)
    assert abs(r.beta) <= math.sinh(theta)
    assert parametric_bounds(prof, "2").beta_cap == pytest.approx(math.sinh(theta), rel=1e-12)


def test_monotone_ramp():
    prof = ramp_profile(1.0, 2.0)
    r = evolve(prof)
    cap = 1 / (2 * math.sqrt(2))
    assert abs(r.beta) < cap
    rep = parametric_bounds(prof, "2a")
    assert rep.beta_cap == pytest.approx(cap, rel=1e-14)
    assert oscillator_monotonic_caps(1.0, 2.0)[1] == pytest.approx(cap, rel=1e-14)
    assert abs(r.alpha) ** 2 - abs(r.beta) ** 2 == pytest.approx(1.0, abs=1e-9)


def test_single_minimum_alpha_cap():
    prof = sech2_profile(1.0, -0.5)
    rep = parametric_bounds(prof, "2b")
    assert rep.alpha_cap == pytest.approx(1.25, rel=1e-10)
    assert oscillator_single_extremum_caps(1.0, 1.0, 0.5)[0] == pytest.approx(1.25, rel=1e-15)
    assert abs(evolve(prof).alpha) <= rep.alpha_cap


def test_multi_extrema_caps_tighten_case2():
    prof = two_bump_profile()
    ext = verify.omega_extrema(prof)
    assert [e[2] for e in ext] == ["valley", "peak", "valley"]
    rep = parametric_bounds(prof, "2c")
    theta = oscillator_case2_theta(prof)
    # a single sign change of omega' per extremum: the product form equals the Case 2 quadrature
    assert rep.alpha_cap == pytest.approx(math.cosh(theta), rel=1e-8)
    assert rep.beta_cap == pytest.approx(math.sinh(theta), rel=1e-8)
    peaks = [e[1] for e in ext if e[2] == "peak"]
    valleys = [e[1] for e in ext if e[2] == "valley"]
    a, b = oscillator_multi_extrema_caps(1.0, 1.0, peaks, valleys, "valley", "valley")
    assert (a, b) == pytest.approx((rep.alpha_cap, rep.beta_cap), rel=1e-10)
    r = evolve(prof)
    assert abs(r.beta) <= rep.beta_cap


@pytest.mark.parametrize("units", [DEFAULT_UNITS, ALT], ids=["default", "alt"])
def test_case1_theta_in_omega(units):
    # scattering theta = int |w0^2 - w^2| / (2 w0): unit-free on the oscillator side
    prof = sech2_profile(1.2, 0.25)
    assert parametric_bounds(prof, "1", units).theta_integral == pytest.approx(
        oscillator_case1_theta(prof), rel=1e-12)


def test_mirror_on_random_profiles():
    checks = verify.mirror_suite(20, seed=0)
    bad = [c for c in checks if not c.passed]
    assert not bad, bad
    assert {c.family for c in checks} >= {"case1", "case2"}


@pytest.mark.parametrize("seed", [1, 2])
def test_random_profiles_respect_case2(seed):
    rng = np.random.default_rng(seed)
    for _ in range(3):
        prof = verify.random_frequency_profile(rng)
        r = evolve(prof)
        rep = case2_bound(*(lambda p: (p.potential, p.units, p.energy))(to_scattering(prof)))
        assert not rep.violations(alpha=r.alpha, beta=r.beta)


def test_case_preconditions():
    with pytest.raises(NonAlternatingProfile):
        parametric_bounds(sech2_profile(1.0, 0.3), "2a")
    with pytest.raises(NonAlternatingProfile):
        parametric_bounds(ramp_profile(1.0, 2.0), "2b")
    with pytest.raises(NonAlternatingProfile):
        parametric_bounds(two_bump_profile(), "2bAsym")
    with pytest.raises(AsymmetricAsymptotes):
        oscillator_case1_theta(ramp_profile(1.0, 2.0))
    with pytest.raises(AsymmetricAsymptotes):
        parametric_bounds(ramp_profile(1.0, 2.0), "1")
    with pytest.raises(TurningPoint):
        FrequencyProfile(lambda t: t, 0.0, 1.0, DOMAIN)
    with pytest.raises(TurningPoint):
        to_scattering(sech2_profile(1.0, -1.5))
