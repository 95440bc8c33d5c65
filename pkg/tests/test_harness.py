import json
import math
import time

import numpy as np
import pytest

from superpose import DomainError, capacity
from superpose.cli import main
from superpose.harness import (
    ConfigError,
    compare_bounds,
    compare_bounds_for,
    config_from_dict,
    load_config,
    parse_override,
    run_monte_carlo,
    verify_lemmas,
    wilson_interval,
)
from superpose.harness.io import read_trials_csv, write_run, write_trials_csv

BASE = {"P": 15.0, "sigma2": 1.0, "L": 4, "M": 4, "rate_fraction": 0.3, "alpha0": 0.25, "trials": 40, "master_seed": 3}


def test_config_validation():
    cfg = config_from_dict(BASE)
    assert cfg.code_spec().n == round(4 * math.log(4) / (0.3 * capacity(15.0)))
    bad = [
        dict(BASE, trials=0),
        dict(BASE, alpha0=0.0),
        dict(BASE, alpha0=1.5),
        dict(BASE, a=1.0),
        dict(BASE, R=0.3),
        dict(BASE, dict_kind="rademacher"),
        dict(BASE, L=13, decode_cap=4**12),
        dict(BASE, typo=1),
    ]
    for d in bad:
        with pytest.raises(ConfigError):
            config_from_dict(d)


def test_config_from_a():
    cfg = config_from_dict({k: v for k, v in BASE.items() if k != "M"} | {"a": 1.0})
    assert cfg.code_spec().M == 4


def test_config_cap_message_states_codebook_size():
    with pytest.raises(ConfigError, match="4096"):
        config_from_dict(dict(BASE, L=6, decode_cap=1000))


def test_load_config_and_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(BASE))
    assert load_config(p) == config_from_dict(BASE)
    p.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(p)
    assert parse_override("trials=7") == ("trials", 7)
    assert parse_override("dict_kind=gaussian") == ("dict_kind", "gaussian")
    assert parse_override("noiseless=true") == ("noiseless", True)
    with pytest.raises(ConfigError):
        parse_override("nosuch=1")


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and hi == pytest.approx(3.8415 / (100 + 3.8415), rel=1e-3)
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and (hi - 0.5) == pytest.approx(0.5 - lo)


def test_monte_carlo_deterministic_across_threads():
    cfg = config_from_dict(BASE)
    a, b = run_monte_carlo(cfg, threads=1), run_monte_carlo(cfg, threads=3)
    assert np.array_equal(a.histogram, b.histogram)
    assert a.records == b.records
    c = run_monte_carlo(cfg.replace(master_seed=4))
    assert [r.seed for r in c.records] != [r.seed for r in a.records]


def test_monte_carlo_accounting():
    res = run_monte_carlo(config_from_dict(dict(BASE, sigma2=4.0)))
    assert res.histogram.sum() == res.counted == 40
    assert res.events == sum(r.mistakes >= res.threshold for r in res.records)
    assert res.p_hat == res.events / res.counted
    assert all(0 <= r.mistakes <= 4 and r.alpha == r.mistakes / 4 for r in res.records)


def test_noiseless_control_has_no_errors():
    res = run_monte_carlo(config_from_dict(dict(BASE, trials=100, noiseless=True)))
    assert res.events == 0 and res.p_hat == 0.0
    assert res.counted + res.excluded_duplicates == 100


def test_noiseless_duplicates_reported():
    # n = 1 Bernoulli rows collide almost surely
    res = run_monte_carlo(config_from_dict({k: v for k, v in BASE.items() if k != "rate_fraction"} | {"n": 1, "noiseless": True}))
    assert res.excluded_duplicates > 0
    assert res.counted + res.excluded_duplicates == 40


def test_persistence_round_trip(tmp_path):
    res = run_monte_carlo(config_from_dict(dict(BASE, sigma2=4.0)))
    path = write_trials_csv(tmp_path / "t.csv", res.records)
    assert read_trials_csv(path) == res.records


def test_write_run_outputs(tmp_path):
    cfg = config_from_dict(BASE)
    res = run_monte_carlo(cfg)
    paths = write_run(tmp_path, res, compare_bounds_for(cfg))
    doc = json.loads(paths["run"].read_text())
    assert doc["config"]["master_seed"] == 3 and doc["master_seed"] == 3
    assert "version" in doc and doc["results"]["trials"] == 40
    assert paths["bounds"].read_text().splitlines()[0] == "l,alpha,c_alpha,t_gauss,log_err_gauss,t_ber,log_err_ber"
    assert paths["aggregate"].read_text().startswith("quantity,value\n")


def test_compare_bounds_report():
    v, L = 15.0, 100
    R = 0.3 * capacity(v)
    rep = compare_bounds(0.1, v, R, L, 2000)
    assert rep.gauss.E_lower - rep.ber.E_lower == pytest.approx(rep.iotas.iota, abs=1e-12)
    assert rep.ber.prob_bound >= rep.gauss.prob_bound
    assert len(rep.rows) == L - 10 + 1
    assert all(r.t_gauss >= 0 and r.t_ber >= 0 for r in rep.rows)
    big = compare_bounds(0.1, v, R, L, 20_000)
    assert big.gauss.prob_bound <= rep.gauss.prob_bound
    assert big.ber.prob_bound <= rep.ber.prob_bound
    assert set(rep.to_dict()["vacuous"]) == {"gauss_exponent", "ber_exponent", "gauss_summed", "ber_summed"}


def test_compare_bounds_rejects_rate_above_capacity():
    with pytest.raises(DomainError, match="1.386"):
        compare_bounds(0.1, 15.0, 2.0, 10, 100)


def test_verify_clean_and_corrupted():
    assert verify_lemmas("quad1d").passed
    bad = verify_lemmas("quad1d", eta=0.1)
    assert bad.violations and all(r.suite == "quad1d" for r in bad.violations)
    with pytest.raises(ValueError):
        verify_lemmas("nope")


def test_verify_phi_suite_timing():
    t0 = time.perf_counter()
    rep = verify_lemmas("phi", lmax=2000)
    assert time.perf_counter() - t0 < 60
    assert rep.passed


def test_cli_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(BASE))
    assert main(["simulate", "--config", str(cfg), "--trials", "10", "--threads", "2", "--out", str(tmp_path / "run")]) == 0
    assert (tmp_path / "run" / "aggregate.csv").exists()
    assert main(["simulate", "--config", str(cfg), "--set", "bogus=1", "--out", str(tmp_path / "r")]) == 2
    assert main(["bounds", "--v", "15", "--rate-fraction", "0.3", "--L", "20", "--a", "1", "--alpha0", "0.1",
                 "--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "b_per_l.csv").exists()
    assert main(["bounds", "--v", "15", "--rate-fraction", "1.5", "--L", "20", "--a", "1", "--alpha0", "0.1",
                 "--out", str(tmp_path / "b2.json")]) == 2
    assert main(["verify-lemmas", "--suite", "quad1d", "--out", str(tmp_path / "v.json")]) == 0
    assert main(["verify-lemmas", "--suite", "quad1d", "--eta", "0.1", "--out", str(tmp_path / "v2.json")]) == 1
    assert json.loads((tmp_path / "v2.json").read_text())["passed"] is False
    assert main(["phi-table", "--lmin", "1000", "--lmax", "1010", "--out", str(tmp_path / "p.csv")]) == 0
    assert len((tmp_path / "p.csv").read_text().splitlines()) == 12
    assert main(["iota-table", "--L-list", "100,400", "--alpha0", "0.1", "--v", "15", "--out", str(tmp_path / "i.csv")]) == 0
    assert main(["iota-table", "--L-list", "1", "--alpha0", "0.1", "--v", "15", "--out", str(tmp_path / "i2.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["bounds"])
    assert exc.value.code == 2
