import json
import math
from pathlib import Path

import numpy as np
import pytest

from mixagg.cli import EXIT_CONFIG, EXIT_GAME, EXIT_OK, load_experiment, main, run_experiment, run_verify
from mixagg.engine import GameTrace, verify_regret_chain

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, **overrides):
    cfg = {
        "schema": "mixagg.experiment/1",
        "game": {"loss": {"kind": "CRPS", "domain": [0, 1]}, "mode": "mixable", "n_experts": 3, "horizon": 40, "seed": 5},
        "expert_pool": {"generator": "biased-gaussian", "grid": 32},
        "outcome_stream": {"generator": "latent-sine"},
    }
    for key, val in overrides.items():
        if key in cfg["game"] or key in ("loss", "mode", "n_experts", "horizon", "seed"):
            cfg["game"][key] = val
        else:
            cfg[key] = val
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_demo_config_satisfies_bound(tmp_path):
    out = tmp_path / "demo"
    assert run_experiment(CONFIGS / "crps_demo.json", out) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["bound"] == pytest.approx(math.log(10) / 2, abs=1e-12)
    assert summary["bound_satisfied"] and summary["chain_passed"]
    trace = GameTrace.from_dict(json.loads((out / "trace.json").read_text()))
    assert abs(trace.regret - summary["R_T"]) <= 1e-10
    assert verify_regret_chain(trace).passed


def test_single_expert_has_zero_regret(tmp_path):
    assert run_experiment(write_config(tmp_path, n_experts=1), tmp_path / "o") == EXIT_OK
    assert json.loads((tmp_path / "o" / "summary.json").read_text())["R_T"] == pytest.approx(0.0, abs=1e-12)


def test_same_seed_gives_identical_files(tmp_path):
    cfg = write_config(tmp_path)
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    for name in ("trace.csv", "trace.json", "summary.json", "verification.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_environment_seed_override(tmp_path, monkeypatch):
    cfg = write_config(tmp_path)
    main(["run", str(cfg), "--out", str(tmp_path / "a")])
    monkeypatch.setenv("MIXAGG_SEED", "77")
    main(["run", str(cfg), "--out", str(tmp_path / "b")])
    assert json.loads((tmp_path / "b" / "summary.json").read_text())["seed"] == 77
    assert (tmp_path / "a" / "trace.csv").read_bytes() != (tmp_path / "b" / "trace.csv").read_bytes()


def test_malformed_json_writes_nothing(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"game": {"loss": \n  {"kind": "CRPS",, }}}')
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize(
    "override,needle",
    [
        ({"loss": {"kind": "NOPE"}}, "loss.kind"),
        ({"loss": {"kind": "CRPS"}}, "domain"),
        ({"expert_pool": {"generator": "biased-gaussian", "spread": -1}}, "spread"),
        ({"expert_pool": {"generator": "mystery"}}, "generator"),
        ({"outcome_stream": {"file": "missing.json"}}, "does not exist"),
        ({"formats": ["xml"]}, "formats"),
        ({"mode": "mixable", "loss": {"kind": "SCRPS", "radius": 1, "dim": 2}}, "SCRPS"),
        ({"horizon": 0}, "horizon"),
    ],
)
def test_config_errors(tmp_path, capsys, override, needle):
    cfg = write_config(tmp_path, **override)
    assert run_experiment(cfg, tmp_path / "out") == EXIT_CONFIG
    assert needle in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_infinite_loss_names_round_and_expert(tmp_path, capsys):
    (tmp_path / "obs.json").write_text(json.dumps({"outcomes": [0.5, 0.5, 0.05]}))
    cfg = write_config(
        tmp_path,
        loss={"kind": "KL"},
        n_experts=2,
        horizon=3,
        expert_pool={"generator": "biased-gaussian", "spread": 0.001, "floor": 0.0, "bias_scale": 0.4},
        outcome_stream={"file": "obs.json"},
    )
    assert run_experiment(cfg, tmp_path / "out") == EXIT_GAME
    err = capsys.readouterr().err
    assert "round" in err and "expert 2" in err


def test_outcomes_from_file(tmp_path):
    (tmp_path / "obs.json").write_text(json.dumps({"outcomes": list(np.linspace(0.1, 0.9, 40))}))
    cfg = write_config(tmp_path, outcome_stream={"file": "obs.json"})
    assert run_experiment(cfg, tmp_path / "out") == EXIT_OK


def test_formats_subset(tmp_path):
    cfg = write_config(tmp_path, formats=["csv"])
    run_experiment(cfg, tmp_path / "out")
    assert (tmp_path / "out" / "trace.csv").exists() and not (tmp_path / "out" / "trace.json").exists()


@pytest.mark.parametrize(
    "loss,mode,generator",
    [
        ({"kind": "OT1D", "domain": [0, 1]}, "mixable", "shifted-empirical"),
        ({"kind": "OT1D", "domain": [0, 1]}, "expconcave", "biased-gaussian"),
        ({"kind": "SW2", "radius": 1.0, "dim": 2, "directions": 32}, "expconcave", "shifted-empirical"),
        ({"kind": "MMD", "dim": 2}, "expconcave", "biased-gaussian"),
        ({"kind": "BETA2", "density_bound": 1.0, "base_mass": 10}, "mixable", "biased-gaussian"),
        ({"kind": "LOG"}, "mixable", "biased-gaussian"),
        ({"kind": "CRPS", "domain": [0, 1]}, "mixable", "adversarial-pair"),
    ],
)
def test_games_across_losses(tmp_path, loss, mode, generator):
    n = 2 if generator == "adversarial-pair" else 3
    cfg = write_config(tmp_path, loss=loss, mode=mode, n_experts=n, horizon=15, expert_pool={"generator": generator, "grid": 16})
    assert run_experiment(cfg, tmp_path / "out") == EXIT_OK


def test_load_experiment_returns_streams(tmp_path):
    config, (experts, outcomes), output, formats = load_experiment(write_config(tmp_path))
    assert config.n_experts == 3 and len(experts(0)) == 3
    assert output is None and formats == ["csv", "json"]


def test_verify_command(tmp_path, capsys):
    assert main(["verify", "--scope", "CRPS", "--trials", "100", "--seed", "1", "--out", str(tmp_path)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and all(line.startswith("PASS") for line in lines)
    report = json.loads((tmp_path / "verification.json").read_text())
    assert report["trials"] == 100 and len(report["rows"]) == 2


def test_verify_zero_trials(capsys):
    assert run_verify(None, 0, 0) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_verify_unknown_scope():
    assert run_verify(["BOGUS"], 10, 0) == EXIT_CONFIG
