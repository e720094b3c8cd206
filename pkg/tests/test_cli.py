import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from swbandits import cli
from swbandits.config import load_config, parse_config
from swbandits.errors import ConfigurationError
from swbandits.rewards import make_lipschitz_smooth, make_piecewise_constant, save_trajectory
from swbandits.window import WindowStats

ROOT = Path(__file__).resolve().parents[1]

SWAP = {"kind": "piecewise_constant", "K": 2, "T": 400, "boundaries": [201], "means": [[0.9, 0.1], [0.1, 0.9]]}


def write_config(tmp_path, **over):
    doc = {"environment": SWAP, "policies": [{"policy": "beta_swts", "tau": 50}], "replications": 3, "seed": 1,
           "timestamp": "fixed"}
    doc.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def run(*args):
    return cli.main(["--jobs", "1", *map(str, args)])


# --- configuration ----------------------------------------------------------

def test_config_defaults_and_seed_override(tmp_path):
    cfg = load_config(write_config(tmp_path), environ={})
    assert cfg.seed == 1 and cfg.replications == 3 and cfg.timestamp == "fixed"
    cfg = load_config(write_config(tmp_path), environ={"BANDIT_SEED": "99"})
    assert cfg.seed == 99
    with pytest.raises(ConfigurationError):
        load_config(write_config(tmp_path), environ={"BANDIT_SEED": "abc"})


@pytest.mark.parametrize(
    "over,match",
    [
        ({"polices": []}, "unknown configuration keys"),
        ({"environment": dict(SWAP, colour="red")}, "unknown keys"),
        ({"environment": dict(SWAP, kind="spiral")}, "unknown environment kind"),
        ({"policies": [{"policy": "beta_swts"}]}, "tau"),
        ({"policies": [{"policy": "gamma_swgts", "tau": 1}]}, "tau >= K"),
        ({"replications": 0}, "replications"),
        ({"horizon": 500}, "horizon"),
        ({"sweep_policy": {"policy": "beta_swts", "tau": 3}, "tau_list": [5]}, "sweep_policy"),
        ({"policies": [{"policy": "beta_swts", "tau": 5}, {"policy": "beta_swts", "tau": 5}]}, "unique"),
    ],
)
def test_config_rejections(over, match):
    doc = {"environment": SWAP, "policies": [{"policy": "oracle"}]}
    doc.update(over)
    with pytest.raises(ConfigurationError, match=match):
        parse_config(doc, environ={})


def test_config_family_mismatch_and_gamma_warning():
    env = dict(SWAP, means=[[1.0, -1.0], [-1.0, 1.0]], family={"family": "subgaussian", "proxy_variance": 1.0})
    with pytest.raises(ConfigurationError, match="Bernoulli"):
        parse_config({"environment": env, "policies": [{"policy": "beta_swts", "tau": 5}]}, environ={})
    cfg = parse_config({"environment": env, "policies": [{"policy": "gamma_swgts", "tau": 5, "gamma": 3.0}]},
                       environ={})
    assert any("gamma" in w for w in cfg.warnings)


def test_horizon_fills_environment():
    env = {k: v for k, v in SWAP.items() if k != "T"}
    cfg = parse_config({"environment": env, "horizon": 300}, environ={})
    assert cfg.trajectory.horizon == 300


# --- commands ---------------------------------------------------------------

def test_simulate_outputs_and_determinism(tmp_path, capsys):
    cfg = write_config(tmp_path, policies=[{"policy": "beta_swts", "tau": 50}, {"policy": "stationary_ts"}])
    assert run("simulate", "--config", cfg, "--out", tmp_path / "a") == 0
    assert run("simulate", "--config", cfg, "--out", tmp_path / "b") == 0
    for name in ("regret.csv", "summary.json", "regret.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["timestamp"] == "fixed"
    assert len({p["fingerprint"] for p in summary["policies"]}) == 2
    svg = (tmp_path / "a" / "regret.svg").read_text()
    assert svg.startswith("<svg") and "polygon" in svg and "stationary_ts" in svg


def test_simulate_oracle_all_zero(tmp_path):
    cfg = write_config(tmp_path, policies=[{"policy": "oracle"}])
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o") == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "regret.csv")))
    assert rows and all(float(r["mean_regret"]) == 0.0 for r in rows)


def test_simulate_seed_env_changes_output(tmp_path, monkeypatch):
    cfg = write_config(tmp_path)
    run("simulate", "--config", cfg, "--out", tmp_path / "a")
    monkeypatch.setenv("BANDIT_SEED", "12345")
    run("simulate", "--config", cfg, "--out", tmp_path / "b")
    assert (tmp_path / "a" / "regret.csv").read_text() != (tmp_path / "b" / "regret.csv").read_text()
    assert json.loads((tmp_path / "b" / "summary.json").read_text())["seed"] == 12345


def test_missing_trajectory_file_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path, environment={"kind": "custom_file", "path": "missing.csv"})
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o") == 2
    assert "missing.csv" in capsys.readouterr().err


def test_missing_config_exit_2(tmp_path, capsys):
    assert run("validate", "--config", tmp_path / "none.json") == 2
    assert "none.json" in capsys.readouterr().err


def test_io_error_exit_3(tmp_path):
    cfg = write_config(tmp_path)
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert run("simulate", "--config", cfg, "--out", blocker / "sub") == 3


def test_input_files_not_mutated(tmp_path):
    traj = make_piecewise_constant(2, 200, [101], [(0.8, 0.2), (0.2, 0.8)])
    save_trajectory(traj, tmp_path / "t.csv")
    before = (tmp_path / "t.csv").read_bytes()
    cfg = write_config(tmp_path, environment={"kind": "custom_file", "path": "t.csv"})
    cfg_before = cfg.read_bytes()
    assert run("simulate", "--config", cfg, "--out", tmp_path / "o") == 0
    assert (tmp_path / "t.csv").read_bytes() == before and cfg.read_bytes() == cfg_before


def test_validate(tmp_path, capsys):
    assert run("validate", "--config", write_config(tmp_path)) == 0
    assert capsys.readouterr().out.startswith("ok:")
    bad = write_config(tmp_path, policies=[{"policy": "beta_swts", "tau": 0}])
    assert run("validate", "--config", bad) == 2


def test_sweep(tmp_path):
    cfg = write_config(tmp_path, tau_list=[10, 100], sweep_policy={"policy": "beta_swts"})
    assert run("sweep", "--config", cfg, "--out", tmp_path / "s") == 0
    rows = list(csv.DictReader(open(tmp_path / "s" / "sweep.csv")))
    assert [r["tau"] for r in rows] == ["10", "100"]
    assert (tmp_path / "s" / "sweep.svg").exists()


def test_analyze(tmp_path):
    stat = make_piecewise_constant(2, 300, [], [(0.9, 0.5)])
    swap = make_piecewise_constant(2, 300, [151], [(0.9, 0.1), (0.1, 0.9)])
    smooth, sigma = make_lipschitz_smooth(2, 2000, 0.0005, 0.3, shape="parallel", period=1000)
    for name, traj in (("stat", stat), ("swap", swap), ("smooth", smooth)):
        save_trajectory(traj, tmp_path / f"{name}.csv")
    assert run("analyze", "--traj", tmp_path / "stat.csv", "--tau", "10", "--out", tmp_path / "a1") == 0
    rep = json.loads((tmp_path / "a1" / "report_tau_10.json").read_text())
    assert rep["upsilon_T"] == 0 and rep["delta_tau"] == pytest.approx(0.4)
    assert run("analyze", "--traj", tmp_path / "swap.csv", "--tau", "10,20", "--out", tmp_path / "a2") == 0
    assert json.loads((tmp_path / "a2" / "report_tau_10.json").read_text())["f_tau_prime_size"] == 10
    assert json.loads((tmp_path / "a2" / "report_tau_20.json").read_text())["f_tau_prime_size"] == 20
    assert run("analyze", "--traj", tmp_path / "smooth.csv", "--tau", "50", "--delta-prime", "0.3",
               "--out", tmp_path / "a3") == 0
    sm = json.loads((tmp_path / "a3" / "report_tau_50.json").read_text())["assumption_verdicts"]["smooth"]
    assert sm["feasible"] and sm["gap_bound_holds"] is True
    assert sm["reduced_gap"] == pytest.approx(0.3 - 2 * sigma * 50)
    assert run("analyze", "--traj", tmp_path / "nope.csv", "--tau", "10", "--out", tmp_path / "a4") == 2


def test_selftest_clean(capsys):
    assert run("selftest") == 0
    first = capsys.readouterr().out
    assert run("selftest") == 0
    assert capsys.readouterr().out == first
    assert len(first.strip().splitlines()) == 6


def test_selftest_fault_injection(monkeypatch, capsys):
    def broken_evict(self):
        # forget to decrement the count of the evicted arm
        self._head = (self._head + 1) % self.tau
        self._size -= 1

    monkeypatch.setattr(WindowStats, "_evict", broken_evict)
    assert run("selftest") == 1
    out = capsys.readouterr().out
    assert "FAIL window-stats" in out and "failed: window-stats" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "swbandits", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout


def test_shipped_configs_validate():
    for path in sorted((ROOT / "configs").glob("*.json")):
        assert run("validate", "--config", path) == 0, path.name
