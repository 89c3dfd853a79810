"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

The lines are printed at the end of the pytest run (see conftest.py) and by
``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from szscatter import catalog, verify
from szscatter.bounds import case1_bound, monotonic_bound, single_extremum_bound
from szscatter.engine import PhaseVariant, full_line_matrix, integrate, transfer_matrix
from szscatter.parametric import FrequencyProfile, evolve, parametric_bounds
from szscatter.potentials import DEFAULT_UNITS as U
from szscatter.potentials import asymptotic_wavenumbers

RESULTS = []


def record(n, name, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def _variant(pot):
    return PhaseVariant.CONSTANT_K if pot.symmetric_asymptotes else PhaseVariant.WKB


@pytest.fixture(scope="module")
def catalog_runs():
    """50-point grids over every catalog entry: (name, E, T_exact, result, seconds)."""
    t0 = time.perf_counter()
    runs = []
    for name in catalog.names():
        entry = catalog.get(name)
        pot = entry.potential()
        for E in entry.energy_grid(50, U):
            E = float(E)
            runs.append((name, E, entry.exact_T(E, U),
                         integrate(pot, U, E, _variant(pot), keep_states=True)))
    return runs, time.perf_counter() - t0


def test_1_catalog_equivalence(catalog_runs):
    runs, seconds = catalog_runs
    worst = max(abs(r.T - T) / T for _, _, T, r in runs)
    where = max(runs, key=lambda x: abs(x[3].T - x[2]) / x[2])
    ok = worst <= 1e-6 and seconds <= 120.0 and len(runs) == 7 * 50
    assert record(1, "catalog equivalence", ok,
                  f"{len(runs)} points, max rel err {worst:.2e} ({where[0]} E={where[1]:.4g}), "
                  f"{seconds:.1f}s")


def test_2_conservation(catalog_runs):
    runs, _ = catalog_runs
    resid = max(abs(s.conservation - 1.0) for *_, r in runs for s in r.states)
    tr = max(abs(r.T + r.R - 1.0) for *_, r in runs)
    assert record(2, "conservation", resid <= 1e-8 and tr <= 1e-7,
                  f"max |(|a|^2-|b|^2)-1| {resid:.2e}, max |T+R-1| {tr:.2e}")


def test_3_bound_dominance():
    t0 = time.perf_counter()
    checks = verify.dominance_suite(n_potentials=200, n_energies=10, seed=0, slack=1e-9,
                                    include_catalog=True)
    bad = [c for c in checks if not c.passed]
    n_random = sum(c.potential.startswith("random") for c in checks)
    detail = (f"{len(checks)} family checks ({n_random} on 200x10 random), "
              f"{len(bad)} violations, {time.perf_counter() - t0:.0f}s")
    if bad:
        c = bad[0]
        detail += f"; first: {c.potential} E={c.energy!r} {c.family} {c.detail}"
    assert record(3, "bound dominance", not bad, detail)


def test_4_saturation():
    V1, V2, V3 = 0.0, -3.0, -1.0
    E = 1.0
    k1, k2, k3 = math.sqrt(E - V1), math.sqrt(E - V2), math.sqrt(E - V3)
    floor = single_extremum_bound(k1, k3, k2).T_floor
    gaps = []
    for n in range(3):
        L = (2 * n + 1) * math.pi / 2 / k2
        pot = catalog.asymmetric_well_potential(V1, V2, V3, L)
        gaps.append(abs(integrate(pot, U, E, PhaseVariant.WKB).T - floor))
    V_e, Lb = 0.5, 2.0
    res = []
    for n in (1, 2, 3):
        Eb = V_e + (n * math.pi / Lb) ** 2
        res.append(abs(integrate(catalog.square_barrier_potential(V_e, Lb), U, Eb).T - 1.0))
    ok = max(gaps) <= 1e-6 and max(res) <= 1e-8
    assert record(4, "saturation", ok,
                  f"well |T-T_floor| n=0,1,2: {', '.join(f'{g:.1e}' for g in gaps)}; "
                  f"barrier |T-1| n=1,2,3: {', '.join(f'{r:.1e}' for r in res)}")


def test_5_step_function_limit():
    E = 1.0
    Rs = []
    for L in (1.0, 0.1, 0.01):
        pot = catalog.tanh_step_potential(0.0, 0.75, L)
        Rs.append(integrate(pot, U, E, PhaseVariant.WKB).R)
    km, kp = asymptotic_wavenumbers(pot, U, E)
    cap = monotonic_bound(km, kp).R_cap
    ok = Rs[0] < Rs[1] < Rs[2] and max(Rs) <= cap and cap - Rs[2] <= 1e-3
    assert record(5, "step-function limit", ok,
                  f"R(L=1,0.1,0.01) = {', '.join(f'{r:.6f}' for r in Rs)}, R_cap {cap:.6f}, "
                  f"gap at 0.01 {cap - Rs[2]:.1e}")


def test_6_delta_asymptotics():
    s = 2.0
    E = 100 * U.mass * s**2 / (2 * U.hbar**2)
    weak = case1_bound(catalog.delta_potential(s), U, E)[1]
    T = catalog.delta_T(s, E)
    gap = (T - weak.T_floor) / T
    assert record(6, "delta asymptotics", T >= weak.T_floor and gap <= 0.01,
                  f"E={E:g}: T={T:.6f}, weak floor {weak.T_floor:.6f}, relative gap {gap:.2e}")


def test_7_born_order_scaling():
    from szscatter.approximations import above_barrier_beta, born_beta, distorted_born_beta
    lams = np.array([1.0, 0.5, 0.25, 0.125])
    slopes = {}
    for label, fn, variant in (("born", born_beta, PhaseVariant.CONSTANT_K),
                               ("distorted", distorted_born_beta, PhaseVariant.CONSTANT_K),
                               ("above_barrier", above_barrier_beta, PhaseVariant.WKB)):
        errs = []
        for lam in lams:
            pot = catalog.sech2_potential(0.2 * lam, 1.0)
            errs.append(abs(fn(pot, U, 1.0).beta - integrate(pot, U, 1.0, variant).beta))
        slopes[label] = np.polyfit(np.log(lams), np.log(errs), 1)[0]
    assert record(7, "Born-order scaling", min(slopes.values()) >= 1.8,
                  ", ".join(f"{k} slope {v:.2f}" for k, v in slopes.items()))


def test_8_transfer_matrix_algebra():
    rng = np.random.default_rng(0)
    worst_det = worst_sz = worst_comp = 0.0
    for name in catalog.names():
        entry = catalog.get(name)
        pot = entry.potential()
        v = _variant(pot)
        for E in entry.energy_grid(3, U):
            m = full_line_matrix(pot, U, float(E), v)
            worst_det = max(worst_det, abs(m.det - 1.0))
            worst_sz = max(worst_sz, m.su11_residual())
        E = float(entry.energy_grid(3, U)[1])
        for _ in range(3):
            x1, x2, x3 = sorted(rng.uniform(pot.x_lo, pot.x_hi, 3))[::-1]
            E31 = transfer_matrix(pot, U, E, v, x1, x3)
            E32 = transfer_matrix(pot, U, E, v, x2, x3)
            E21 = transfer_matrix(pot, U, E, v, x1, x2)
            worst_comp = max(worst_comp, float(np.max(np.abs((E32 @ E21).matrix - E31.matrix))))
    ok = max(worst_det, worst_sz, worst_comp) <= 1e-8
    assert record(8, "transfer-matrix algebra", ok,
                  f"|det-1| {worst_det:.1e}, |E^H sz E - sz| {worst_sz:.1e}, "
                  f"composition {worst_comp:.1e}")


def test_9_parametric_mirror():
    checks = verify.mirror_suite(n_profiles=20, seed=0)
    bad = [c for c in checks if not c.passed]
    worst = max(float(c.detail.split("=")[1]) for c in checks)
    ramp = FrequencyProfile(lambda t: 1.5 + 0.5 * np.tanh(np.asarray(t)), 1.0, 2.0, (-30.0, 30.0),
                            d_omega=lambda t: 0.5 / np.cosh(np.asarray(t)) ** 2)
    cap = parametric_bounds(ramp, "2a").beta_cap
    beta = abs(evolve(ramp).beta)
    ok = not bad and cap == pytest.approx(1 / (2 * math.sqrt(2)), rel=1e-14) and beta < cap
    assert record(9, "parametric mirror", ok,
                  f"{len(checks)} form comparisons on 20 profiles, max rel diff {worst:.1e}; "
                  f"ramp 1->2 |beta| {beta:.6f} < {cap:.6f}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
