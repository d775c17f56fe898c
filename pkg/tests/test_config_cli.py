"""Configuration validation and the command-line pipeline."""

import json
import logging
import math

import numpy as np
import pytest
import yaml

from kicked_lmg import ConfigError, config_from_dict, load_config, log_grid
from kicked_lmg.cli import (
    EXTRACTION_HEADER,
    MASTER_HEADER,
    POINCARE_HEADER,
    SPLITTING_HEADER,
    SUMMARY_HEADER,
    _crossing_from_columns,
    _fits_from_master,
    _parse_master,
    _write_csv,
    main,
)
from kicked_lmg.config import EPS_GRID_DEFAULT, config_to_dict, echo_config

# ---------------------------------------------------------------------------
# configuration schema


def test_empty_config_is_headline_run():
    cfg = config_from_dict({})
    assert cfg.model.j_list == (300.0,)
    assert cfg.model.omega0 == 1.0
    assert cfg.model.gamma_x == -0.95
    assert (cfg.resonance.r, cfg.resonance.s) == (1, 1)
    assert cfg.resonance.t_target == 8.0
    assert cfg.resonance.e_r is None
    assert cfg.drive.epsilons[0] == EPS_GRID_DEFAULT["start"]
    assert cfg.drive.epsilons[-1] == EPS_GRID_DEFAULT["stop"]
    assert cfg.numerics.drift_tol == 1e-10
    assert cfg.numerics.tracking_mode == "continuation"
    assert cfg.output.directory == "out"
    assert cfg.output.formats == ("csv",)
    assert cfg.poincare is None
    assert load_config(None) == cfg


def test_log_grid_endpoints_and_count():
    grid = log_grid(1e-2, 1e-1, 10)
    assert len(grid) == 11
    assert grid[0] == 1e-2
    assert grid[-1] == 1e-1
    assert np.allclose(np.diff(np.log(grid)), math.log(10) / 10)
    with pytest.raises(ConfigError):
        log_grid(0.0, 1.0, 10)
    with pytest.raises(ConfigError):
        log_grid(1.0, 0.5, 10)
    with pytest.raises(ConfigError):
        log_grid(1e-3, 1e-1, 0)


@pytest.mark.parametrize(
    "raw, fragment",
    [
        ({"bogus": 1}, "bogus"),
        ({"model": {"bogus": 1}}, "model.bogus"),
        ({"resonance": {"bogus": 1}}, "resonance.bogus"),
        ({"drive": {"bogus": 1}}, "drive.bogus"),
        ({"drive": {"eps_grid": {"weird": 1}}}, "drive.eps_grid.weird"),
        ({"numerics": {"bogus": 1}}, "numerics.bogus"),
        ({"output": {"bogus": 1}}, "output.bogus"),
        ({"poincare": {"seeds": [[0.0, 0.0]], "bogus": 1}}, "poincare.bogus"),
    ],
)
def test_unknown_keys_rejected_with_path(raw, fragment):
    with pytest.raises(ConfigError, match=fragment.replace(".", r"\.")):
        config_from_dict(raw)


def test_exclusive_key_pairs():
    with pytest.raises(ConfigError, match="not both"):
        config_from_dict({"model": {"J": 30, "J_list": [30]}})
    with pytest.raises(ConfigError, match="not both"):
        config_from_dict({"resonance": {"E_R": -0.7, "T_target": 8.0}})
    with pytest.raises(ConfigError, match="not both"):
        config_from_dict({"drive": {"epsilon": 0.1, "eps_grid": {}}})


def test_scalar_validation():
    with pytest.raises(ConfigError, match="must be a number"):
        config_from_dict({"model": {"J": True}})
    with pytest.raises(ConfigError, match="positive"):
        config_from_dict({"model": {"J": -3}})
    with pytest.raises(ConfigError, match="J_list"):
        config_from_dict({"model": {"J_list": []}})
    with pytest.raises(ConfigError, match="J_list"):
        config_from_dict({"model": {"J_list": [30, -1]}})
    with pytest.raises(ConfigError, match="integer"):
        config_from_dict({"resonance": {"r": 1.5}})
    with pytest.raises(ConfigError, match=">="):
        config_from_dict({"drive": {"epsilon": -0.1}})
    with pytest.raises(ConfigError, match="overlap_floor"):
        config_from_dict({"numerics": {"overlap_floor": 1.0}})
    with pytest.raises(ConfigError, match="tracking_mode"):
        config_from_dict({"numerics": {"tracking_mode": "magic"}})
    with pytest.raises(ConfigError, match="formats"):
        config_from_dict({"output": {"formats": ["xml"]}})


def test_resonance_energy_pins_no_return_time():
    cfg = config_from_dict({"resonance": {"E_R": -0.723276}})
    assert cfg.resonance.e_r == -0.723276
    assert cfg.resonance.t_target is None


def test_poincare_group_defaults_and_checks():
    cfg = config_from_dict(
        {"resonance": {"r": 2}, "poincare": {"seeds": [[3.1, -0.2]]}}
    )
    assert cfg.poincare.taus == (4.0,)  # s * T_target / r
    assert cfg.poincare.epsilons == cfg.drive.epsilons
    assert cfg.poincare.n_iter == cfg.numerics.n_iter
    with pytest.raises(ConfigError, match="seeds"):
        config_from_dict({"poincare": {}})
    with pytest.raises(ConfigError, match=r"\|z\| > 1"):
        config_from_dict({"poincare": {"seeds": [[0.0, 1.5]]}})
    with pytest.raises(ConfigError, match="pair"):
        config_from_dict({"poincare": {"seeds": [[0.0, 0.1, 0.2]]}})
    with pytest.raises(ConfigError, match="taus is required"):
        config_from_dict({"resonance": {"E_R": -0.7}, "poincare": {"seeds": [[0.0, 0.0]]}})


def test_config_echo_contains_resolved_defaults(tmp_path):
    cfg = config_from_dict({"drive": {"eps_grid": {"start": 1e-3, "stop": 1e-2}}})
    path = echo_config(cfg, tmp_path)
    echoed = yaml.safe_load(path.read_text())
    assert echoed["model"]["J_list"] == [300.0]
    assert echoed["resonance"]["T_target"] == 8.0
    assert echoed["drive"]["eps_grid"]["points_per_decade"] == 20
    assert echoed["drive"]["resolved_epsilons"] == list(cfg.drive.epsilons)
    assert echoed["numerics"]["n_grid"] == 200
    assert echoed["output"]["formats"] == ["csv"]
    # the echo is complete: round-tripping the core groups changes nothing
    back = dict(echoed)
    back["drive"] = {"eps_grid": echoed["drive"]["eps_grid"]}
    assert config_from_dict(back) == cfg


def test_bad_config_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("model: {J: 30\n")
    with pytest.raises(ConfigError, match="not valid YAML"):
        load_config(bad)
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(scalar)


def test_config_to_dict_reports_single_epsilon():
    d = config_to_dict(config_from_dict({"drive": {"epsilon": 0.25}}))
    assert d["drive"]["epsilon"] == 0.25
    assert d["drive"]["resolved_epsilons"] == [0.25]


# ---------------------------------------------------------------------------
# CSV and fit helpers


def test_write_csv_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    _write_csv(path, "a,b", [])
    assert path.read_text() == "a,b\n"


def test_csv_headers_are_the_external_contract():
    assert POINCARE_HEADER == "seed_id,iter,phi,z"
    assert EXTRACTION_HEADER == (
        "J,r,s,tau,epsilon,S_plus,S_minus,trM,detM,I_rs,m_rs,K_rs,delta_rat,delta_harm"
    )
    assert SPLITTING_HEADER == "J,r,s,tau,epsilon,delta_phi,delta_scaled,overlap,status"
    assert MASTER_HEADER == "J,r,s,tau,epsilon,delta_quantum_scaled,delta_rat,delta_harm,status"
    assert SUMMARY_HEADER == "J,r,k_R,tau_q"


def test_crossing_from_columns():
    eps = np.geomspace(1e-4, 1e-1, 13)
    d_rat = 0.13 * eps
    d_harm = np.full_like(eps, 0.13 * 1e-2)  # crossing at 1e-2 exactly
    cross = _crossing_from_columns(eps, d_rat, d_harm)
    assert cross == pytest.approx(1e-2, rel=1e-12)
    # nan rows are gaps, not zeros: still bracketed around them
    d_rat_gap = d_rat.copy()
    d_rat_gap[5] = math.nan
    assert _crossing_from_columns(eps, d_rat_gap, d_harm) == pytest.approx(1e-2, rel=1e-3)
    assert _crossing_from_columns(eps, 10 * d_harm + 1.0, d_harm) is None
    assert _crossing_from_columns(eps[:1], d_rat[:1], d_harm[:1]) is None


def _synthetic_master(path):
    a1, m1 = 0.065, 1.52
    a2, m2 = 0.035, 2.38
    lines = [MASTER_HEADER]
    for j in (60.0, 90.0, 150.0, 300.0):
        hbar = 1.0 / j
        for e in map(float, np.geomspace(1e-6, 1e-2, 9)):
            d_rat = 2.0 * a1 * e
            d_harm = hbar * 1 * math.sqrt(2.0 * a1 * e / m1)
            lines.append(f"{j!r},1,1,8.0,{e!r},{1e-5!r},{d_rat!r},{d_harm!r},ok")
        for e in map(float, np.geomspace(1e-3, 0.2, 9)):
            d_rat = 2.0 * a2 * e * e
            d_harm = hbar * 2 * math.sqrt(2.0 * a2 * e * e / m2)
            lines.append(f"{j!r},2,1,4.0,{e!r},{1e-5!r},{d_rat!r},{d_harm!r},ok")
    path.write_text("\n".join(lines) + "\n")
    return a1, a2


def test_fits_from_master_exact_power_laws(tmp_path):
    path = tmp_path / "sweep_master.csv"
    a1, a2 = _synthetic_master(path)
    fits = _fits_from_master(path)
    assert set(fits) == {"strength", "validity_edge"}
    labels = [f["resonance"] for f in fits["strength"]]
    assert labels == ["1:1", "2:1"]
    for entry in fits["strength"] + fits["validity_edge"]:
        assert set(entry) == {
            "resonance", "slope", "intercept", "residual_rms", "n_points", "J_list",
        }
    s1, s2 = fits["strength"]
    assert s1["slope"] == pytest.approx(1.0, abs=1e-9)
    assert math.exp(s1["intercept"]) == pytest.approx(a1, rel=1e-9)
    assert s1["n_points"] == 9
    assert s1["J_list"] == [60.0, 90.0, 150.0, 300.0]
    assert s2["slope"] == pytest.approx(2.0, abs=1e-9)
    assert math.exp(s2["intercept"]) == pytest.approx(a2, rel=1e-9)
    v1, v2 = fits["validity_edge"]
    assert v1["slope"] == pytest.approx(-2.0, abs=1e-9)
    assert v2["slope"] == pytest.approx(-1.0, abs=1e-9)
    assert v1["J_list"] == [60.0, 90.0, 150.0, 300.0]


def test_parse_master_rejects_foreign_tables(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ConfigError, match="not a sweep master"):
        _parse_master(path)


# ---------------------------------------------------------------------------
# command line, fast end-to-end runs


def _write_yaml(path, text):
    path.write_text(text)
    return str(path)


def test_main_rejects_bad_config(tmp_path, capsys):
    cfg = _write_yaml(tmp_path / "run.yaml", "model: {bogus: 1}\n")
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "config error" in capsys.readouterr().err


def test_main_spectrum(tmp_path, capsys, caplog):
    cfg = _write_yaml(
        tmp_path / "run.yaml", "model: {J: 30}\ndrive: {epsilon: 0.01}\n"
    )
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "J=30 r=1 k_R=14 tau_q=7.90344990884" in text
    assert "J=30 r=2 k_R=13 tau_q=4.0033731055" in text
    lines = (out / "spectrum_summary.csv").read_text().splitlines()
    assert lines[0] == SUMMARY_HEADER
    assert len(lines) == 3
    assert lines[1].startswith("30.0,1,14,")
    echoed = yaml.safe_load((out / "config_resolved.yaml").read_text())
    assert echoed["output"]["directory"] == str(out)
    assert echoed["drive"]["epsilon"] == 0.01
    assert list((out / "cache").glob("*.npz"))
    first = (out / "spectrum_summary.csv").read_bytes()
    with caplog.at_level(logging.INFO, logger="kicked_lmg.cache"):
        assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
    assert any("cache hit" in rec.message for rec in caplog.records)
    assert (out / "spectrum_summary.csv").read_bytes() == first


def test_main_poincare(tmp_path):
    cfg = _write_yaml(
        tmp_path / "run.yaml",
        "model: {J: 12}\n"
        "drive: {epsilon: 0.3}\n"
        "poincare:\n"
        "  seeds: [[0.0, 0.5], [1.0, -0.25]]\n"
        "  taus: [0.5]\n"
        "  epsilons: [0.0, 0.3]\n"
        "  n_iter: 4\n",
    )
    out1 = tmp_path / "o1"
    assert main(["poincare", "--config", cfg, "--out", str(out1)]) == 0
    names = ["poincare_tau0.5_eps0.0.csv", "poincare_tau0.5_eps0.3.csv"]
    for name in names:
        lines = (out1 / name).read_text().splitlines()
        assert lines[0] == POINCARE_HEADER
        assert len(lines) == 1 + 2 * 5  # two seeds, iterates 0..4
        assert lines[1] == "0,0,0.0,0.5"  # seed echoed at iterate 0
    # a parallel rerun into a fresh directory is byte-identical
    out2 = tmp_path / "o2"
    assert main(["poincare", "--config", cfg, "--out", str(out2), "--workers", "2"]) == 0
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_main_poincare_needs_section(tmp_path):
    cfg = _write_yaml(tmp_path / "run.yaml", "model: {J: 12}\n")
    assert main(["poincare", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_main_splitting(tmp_path):
    cfg = _write_yaml(
        tmp_path / "run.yaml",
        "model: {J_list: [20, 30]}\ndrive: {epsilon: 1.0e-6}\n",
    )
    out = tmp_path / "out"
    assert main(["splitting", "--config", cfg, "--out", str(out), "--workers", "2"]) == 0
    lines = (out / "splitting.csv").read_text().splitlines()
    assert lines[0] == SPLITTING_HEADER
    assert len(lines) == 3
    assert all(line.endswith(",ok") for line in lines[1:])
    assert lines[1].startswith("20.0,1,1,")


def test_main_splitting_reports_tracking_loss(tmp_path):
    cfg = _write_yaml(
        tmp_path / "run.yaml",
        "model: {J: 30}\n"
        "drive: {epsilon: 1.5}\n"
        "numerics: {overlap_floor: 0.99}\n",
    )
    out = tmp_path / "out"
    assert main(["splitting", "--config", cfg, "--out", str(out)]) == 4
    lines = (out / "splitting.csv").read_text().splitlines()
    assert lines[1].endswith(",lost")


def test_main_pendulum_unreachable_resonance(tmp_path, capsys):
    cfg = _write_yaml(
        tmp_path / "run.yaml",
        "model: {J: 12}\nresonance: {T_target: 2.0}\ndrive: {epsilon: 0.01}\n",
    )
    assert main(["pendulum", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    assert "numerical contract violated" in capsys.readouterr().err


FAST_NUMERICS = "numerics: {n_grid: 64, n_iter: 300}\n"


def test_main_pendulum(tmp_path, warmed):
    cfg = _write_yaml(
        tmp_path / "run.yaml",
        "model: {J_list: [20, 40]}\ndrive: {epsilon: 0.01}\n" + FAST_NUMERICS,
    )
    out = tmp_path / "out"
    assert main(["pendulum", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "pendulum_r1s1.csv").read_text().splitlines()
    assert lines[0] == EXTRACTION_HEADER
    assert len(lines) == 3
    row20 = lines[1].split(",")
    row40 = lines[2].split(",")
    # the chain is classical: only the harmonic column may depend on J
    assert row20[0] == "20.0" and row40[0] == "40.0"
    assert row20[1:14 - 1] == row40[1:14 - 1]
    assert float(row20[13]) == pytest.approx(2.0 * float(row40[13]), rel=1e-12)


def test_main_sweep_resume_and_fit(tmp_path, warmed, caplog):
    cfg = _write_yaml(
        tmp_path / "run.yaml",
        "model: {J_list: [20, 30]}\ndrive: {epsilon: 0.01}\n" + FAST_NUMERICS,
    )
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    master = (out / "sweep_master.csv").read_bytes()
    lines = master.decode().splitlines()
    assert lines[0] == MASTER_HEADER
    assert len(lines) == 3
    assert all(line.endswith(",ok") for line in lines[1:])
    fits = json.loads((out / "fits.json").read_text())
    assert set(fits) == {"strength", "validity_edge"}
    # one kick strength cannot support a power law: explicit nulls
    assert fits["strength"][0]["slope"] is None
    assert fits["strength"][0]["n_points"] == 0
    assert (out / "pendulum_r1s1.csv").exists()

    with caplog.at_level(logging.INFO, logger="kicked_lmg.cli"):
        assert main(["sweep", "--config", cfg, "--out", str(out), "--resume"]) == 0
    assert any("resume: keeping 2" in rec.message for rec in caplog.records)
    assert (out / "sweep_master.csv").read_bytes() == master

    assert main(["fit", "--config", cfg, "--out", str(out)]) == 0
    assert json.loads((out / "fits.json").read_text()) == fits


def test_main_fit_needs_master(tmp_path, capsys):
    cfg = _write_yaml(tmp_path / "run.yaml", "model: {J: 12}\n")
    assert main(["fit", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "run sweep first" in capsys.readouterr().err
