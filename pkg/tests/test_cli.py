import csv
import io
import json
import math

import numpy as np
import pytest
import yaml

from szscatter import bounds, catalog, cli
from szscatter.potentials import DEFAULT_UNITS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_compute_free_expression(capsys):
    cfg = {"schema_version": 1,
           "potential": {"kind": "expression", "expr": "0*x", "domain": [-2, 2]},
           "energies": {"min": 0.5, "max": 2.0, "count": 3}}
    path = _write(cfg, "free.json")
    code, out, _ = run(capsys, "compute", "--config", str(path))
    assert code == 0
    rs = rows(out)
    assert [float(r["E"]) for r in rs] == [0.5, 1.25, 2.0]
    for r in rs:
        assert float(r["T"]) == pytest.approx(1.0, abs=1e-12)
        assert float(r["abs_beta"]) < 1e-12
    assert list(rs[0]) == cli.COLUMNS["compute"]


_TMP = {}


@pytest.fixture(autouse=True)
def _tmpdir(tmp_path):
    _TMP["dir"] = tmp_path
    yield


def _write(cfg, name):
    path = _TMP["dir"] / name
    with open(path, "w") as fh:
        if name.endswith(".json"):
            json.dump(cfg, fh)
        else:
            yaml.safe_dump(cfg, fh)
    return path


def test_sech2_sweep_matches_catalog(capsys):
    code, out, _ = run(capsys, "compute", "--potential", "sech2", "--param", "V_e=0.3",
                       "--emin", "0.4", "--emax", "4", "--count", "6")
    assert code == 0
    for r in rows(out):
        E = float(r["E"])
        assert float(r["T"]) == pytest.approx(catalog.sech2_T(0.3, 1.0, E), rel=1e-6)
        assert float(r["conservation_residual"]) <= 1e-8


def test_below_asymptote_is_an_error(capsys):
    code, out, err = run(capsys, "compute", "--potential", "tanh_step", "--emin", "0.5",
                         "--emax", "0.5", "--count", "1")
    assert code == 2
    assert out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1 and "NoPropagatingMode" in lines[0]


@pytest.mark.parametrize("name", catalog.names())
def test_bounds_margins_on_catalog(capsys, name):
    entry = catalog.get(name)
    lo, hi = entry.energy_range(entry.defaults, DEFAULT_UNITS)
    code, out, _ = run(capsys, "bounds", "--potential", name, "--emin", repr(lo),
                       "--emax", repr(hi), "--count", "4")
    assert code == 0
    rs = rows(out)
    assert rs and list(rs[0]) == cli.COLUMNS["bounds"]
    for r in rs:
        assert float(r["margin"]) >= -1e-9
        assert r["flag"] in ("ok", "saturated", "vacuous")


@pytest.mark.parametrize("n", [1, 2])
def test_saturated_rows(capsys, n):
    # V1 = V3 = 0, V2 = -3, L = 1: T meets the single-extremum floor at k2 L = (2n+1) pi/2
    E = ((2 * n + 1) * math.pi / 2) ** 2 - 3.0
    code, out, _ = run(capsys, "bounds", "--potential", "asymmetric_well", "--param", "V3=0",
                       "--emin", repr(E), "--emax", repr(E), "--count", "1",
                       "--family", "Case2b")
    assert code == 0
    (r,) = rows(out)
    assert r["family"] == "Case2b" and r["flag"] == "saturated"


def test_vacuous_weak_row(capsys):
    code, out, _ = run(capsys, "bounds", "--potential", "delta", "--param", "strength=2",
                       "--emin", "1", "--emax", "1", "--count", "1", "--family", "Case1Weak")
    assert code == 0
    (r,) = rows(out)
    assert r["flag"] == "vacuous" and r["validity"] == "vacuous"
    assert float(r["T_floor"]) == 0.0


def test_bounds_json(capsys):
    code, out, _ = run(capsys, "bounds", "--potential", "sech2", "--emin", "1", "--emax", "2",
                       "--count", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert {r["family"] for r in data} >= {"General", "Case1", "Case2"}
    assert all(set(r) == set(cli.COLUMNS["bounds"]) for r in data)


def test_approx_columns(capsys):
    code, out, _ = run(capsys, "approx", "--potential", "sech2", "--param", "V_e=0.05",
                       "--emin", "1", "--emax", "2", "--count", "2")
    assert code == 0
    rs = rows(out)
    assert list(rs[0]) == cli.COLUMNS["approx"]
    for r in rs:
        ode = float(r["abs_beta_ode"])
        assert float(r["abs_beta_born"]) == pytest.approx(ode, rel=0.1)


def test_catalog_list_and_eval(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0
    assert [r["name"] for r in rows(out)] == catalog.names()
    code, out, _ = run(capsys, "catalog", "eval", "delta", "--param", "strength=2",
                       "--energy", "1")
    assert code == 0
    (r,) = rows(out)
    assert float(r["T_exact"]) == 0.5
    code, _, err = run(capsys, "catalog", "eval", "nonesuch", "--energy", "1")
    assert code == 2 and len(err.strip().splitlines()) == 1


def test_trace(capsys):
    code, out, _ = run(capsys, "trace", "--potential", "sech2", "--energy", "1.0")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,re_a,im_a,re_b,im_b,residual"
    assert len(lines) > 10
    assert max(abs(float(l.split(",")[-1])) for l in lines[1:]) < 1e-8


def test_parametric_ramp(capsys):
    cfg = {"schema_version": 1,
           "potential": {"kind": "frequency", "expr": "1.5 + 0.5*tanh(t)", "domain": [-30, 30]}}
    path = _write(cfg, "ramp.yaml")
    code, out, _ = run(capsys, "parametric", "--config", str(path))
    assert code == 0
    rs = {r["case"]: r for r in rows(out)}
    assert "2a" in rs and "2" in rs
    cap = 1 / (2 * math.sqrt(2))
    assert float(rs["2a"]["beta_cap"]) == pytest.approx(cap, rel=1e-12)
    assert float(rs["2a"]["abs_beta"]) < cap
    nb = float(rs["2a"]["abs_beta"])
    assert float(rs["2a"]["particle_number"]) == pytest.approx(nb * nb, rel=1e-12)


def test_yaml_and_json_configs_agree(capsys):
    cfg = {"schema_version": 1, "units": {"hbar": 1.0, "mass": 0.5},
           "potential": {"kind": "sech2", "params": {"V_e": 0.2, "L": 1.0}},
           "energies": {"min": 0.3, "max": 3.0, "count": 4, "spacing": "log"},
           "families": ["Case2"]}
    outs = []
    for name in ("a.yaml", "a.json"):
        code, out, _ = run(capsys, "bounds", "--config", str(_write(cfg, name)))
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    Es = [float(r["E"]) for r in rows(outs[0])]
    assert Es == pytest.approx(list(np.geomspace(0.3, 3.0, 4)), rel=1e-15)


def test_tabulated_config(capsys):
    xs = np.linspace(-8, 8, 161)
    pts = [[float(x), float(0.2 / np.cosh(x) ** 2)] for x in xs]
    cfg = {"schema_version": 1, "potential": {"kind": "tabulated", "points": pts},
           "energies": {"min": 1.0, "max": 1.0, "count": 1}}
    code, out, _ = run(capsys, "compute", "--config", str(_write(cfg, "tab.json")))
    assert code == 0
    (r,) = rows(out)
    assert float(r["T"]) == pytest.approx(catalog.sech2_T(0.2, 1.0, 1.0), rel=1e-4)


def test_expression_config_matches_catalog(capsys):
    cfg = {"schema_version": 1,
           "potential": {"kind": "expression", "expr": "V_e/cosh(x/L)**2",
                         "params": {"V_e": 0.3, "L": 1.0}, "domain": [-20, 20]},
           "energies": {"min": 1.0, "max": 2.0, "count": 2}}
    code, out, _ = run(capsys, "compute", "--config", str(_write(cfg, "expr.yaml")))
    assert code == 0
    for r in rows(out):
        assert float(r["T"]) == pytest.approx(catalog.sech2_T(0.3, 1.0, float(r["E"])), rel=1e-6)


@pytest.mark.parametrize("bad", [{"schema_version": 2},
                                 {"schema_version": 1, "potentail": {}},
                                 {"schema_version": 1, "potential": {"kind": "sech2"},
                                  "energies": {"min": 2.0, "max": 1.0, "count": 3}}])
def test_config_errors(capsys, bad):
    code, out, err = run(capsys, "compute", "--config", str(_write(bad, "bad.json")))
    assert code == 2 and out == ""
    assert len(err.strip().splitlines()) == 1 and "ConfigError" in err


def test_missing_config_file(capsys):
    code, _, err = run(capsys, "compute", "--config", "/nonexistent/sweep.yaml")
    assert code == 2 and len(err.strip().splitlines()) == 1


def test_bit_stable_output(capsys, monkeypatch):
    argv = ("bounds", "--potential", "square_barrier", "--emin", "0.6", "--emax", "3",
            "--count", "4")
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
    monkeypatch.setenv("SZSCATTER_WORKERS", "2")
    assert run(capsys, *argv)[1] == first


def test_output_file(capsys):
    path = _TMP["dir"] / "out.csv"
    code, out, _ = run(capsys, "compute", "--potential", "delta", "--emin", "1", "--emax", "1",
                       "--count", "1", "-o", str(path))
    assert code == 0 and out == ""
    (r,) = rows(path.read_text())
    assert float(r["T"]) == pytest.approx(0.5, rel=1e-6)


def test_verify_small_run(capsys):
    code, out, _ = run(capsys, "verify", "--n-energies", "2", "--n-potentials", "2",
                       "--n-random-energies", "2", "--n-profiles", "2")
    assert code == 0
    assert "catalog" in out and "dominance" in out and "mirror" in out
    assert "FAIL" not in out


def test_verify_tightened(capsys):
    code, out, _ = run(capsys, "verify", "--tighten", "10", "--n-energies", "2",
                       "--n-potentials", "1", "--n-random-energies", "2", "--n-profiles", "1")
    assert code == 0


def test_verify_catches_a_broken_bound(capsys, monkeypatch):
    # mutation: a sign error in the local rate must be caught by the dominance suite
    real = bounds.vartheta
    monkeypatch.setattr(bounds, "vartheta", lambda *a: -real(*a))
    code, out, _ = run(capsys, "verify", "--n-energies", "2", "--n-potentials", "2",
                       "--n-random-energies", "2", "--n-profiles", "1")
    assert code == 1
    assert "FAIL dominance" in out
