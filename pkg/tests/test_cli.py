import csv
import json

import pytest

from hilbertlab.cli import ConfigError, ExperimentConfig, main, parse_lambdas, parse_translate_policy
from hilbertlab.cc import TranslatedBlockSpec


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def poles_file(tmp_path):
    p = tmp_path / "two.json"
    p.write_text(json.dumps({"poles": [0, 1], "weights": [1, 1]}))
    return p


@pytest.fixture
def delta_file(tmp_path):
    p = tmp_path / "delta.json"
    p.write_text(json.dumps({"support_min": 0, "values": [1.0]}))
    return p


def test_parse_lambdas():
    assert parse_lambdas("0.5,1,2") == [0.5, 1.0, 2.0]
    grid = parse_lambdas("log:1e-2:1:3")
    assert grid == pytest.approx([0.01, 0.1, 1.0])
    with pytest.raises(ConfigError, match="lambdas"):
        parse_lambdas("a,b")


def test_parse_translate_policy():
    assert parse_translate_policy("zero", 3) == TranslatedBlockSpec((0, 0, 0))
    assert parse_translate_policy("linear:2", 3) == TranslatedBlockSpec((2, 4, 6))
    assert parse_translate_policy("list:1,-1", 3) == TranslatedBlockSpec((1, -1))
    assert parse_translate_policy("greedy", 3) == "greedy"
    with pytest.raises(ConfigError, match="translates"):
        parse_translate_policy("spiral", 3)


def test_boole_check(tmp_path, poles_file, capsys):
    out = tmp_path / "out"
    code = main(["boole-check", "--poles", str(poles_file), "--lambdas", "0.5,1,2", "--out", str(out)])
    assert code == 0
    rows = read_csv(out / "boole_two.csv")
    above = [r for r in rows if r["side"] == "above"]
    assert len(above) == 3
    assert all(float(r["residual"]) < 1e-9 for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["violations"] == [] and manifest["files"] == ["boole_two.csv"]


def test_boole_check_reports_violation(tmp_path, poles_file):
    out = tmp_path / "out"
    code = main(["boole-check", "--poles", str(poles_file), "--lambdas", "1", "--out", str(out),
                 "--config", str(_config(tmp_path, {"tolerances": {"boole": -1.0}}))])
    assert code == 1
    assert json.loads((out / "manifest.json").read_text())["violations"]


def _config(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return p


def test_weak_type_delta(tmp_path):
    out = tmp_path / "out"
    code = main(["weak-type", "--seq", "gen:delta", "--kind", "full", "--lambdas", "log:1e-2:1:60", "--out", str(out)])
    assert code == 0
    rows = read_csv(out / "weaktype_full_delta0.csv")
    assert len(rows) == 60
    assert max(float(r["ratio"]) for r in rows) < 2.01


def test_empty_inputs_rejected(tmp_path, capsys):
    code = main(["weak-type", "--lambdas", "1", "--out", str(tmp_path / "o")])
    assert code == 2
    assert "inputs" in capsys.readouterr().err


def test_config_unknown_field(tmp_path, capsys):
    code = main(["weak-type", "--config", str(_config(tmp_path, {"lambda_grid": [1]}))])
    assert code == 2
    assert "lambda_grid" in capsys.readouterr().err


def test_config_bad_lambda(tmp_path, capsys):
    cfg = _config(tmp_path, {"inputs": ["gen:delta"], "lambdas": [1, -2], "out": str(tmp_path / "o")})
    assert main(["weak-type", "--config", str(cfg)]) == 2
    assert "lambdas" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["weak-type", "--seq", str(tmp_path / "nope.json"), "--lambdas", "1", "--out", str(tmp_path)]) == 2
    assert "inputs" in capsys.readouterr().err


def test_config_file_drives_run(tmp_path, delta_file):
    out = tmp_path / "cfgout"
    cfg = _config(tmp_path, {"inputs": [str(delta_file)], "lambdas": [0.5], "horizon": 10, "out": str(out)})
    assert main(["complete-conv", "--config", str(cfg)]) == 0
    rows = read_csv(out / "cc_delta_lam0.5.csv")
    assert [int(r["count_A_n"]) for r in rows] == [2] * 10
    assert rows[-1]["cumulative_S"] == "20"
    summary = json.loads((out / "manifest.json").read_text())["summary"]
    assert summary["delta@0.5"]["growth"] == "linear"


def test_out_env(tmp_path, delta_file, monkeypatch):
    monkeypatch.setenv("HILBERTLAB_OUT", str(tmp_path / "envout"))
    assert main(["transform", "--seq", str(delta_file), "--n", "3", "--window=-3..3"]) == 0
    rows = read_csv(tmp_path / "envout" / "transform_delta_n3.csv")
    assert rows[1] == {"k": "-2", "kind": "truncated", "n": "3", "value": "0.5"}


def test_transform_needs_window(tmp_path, delta_file, capsys):
    assert main(["transform", "--seq", str(delta_file), "--n", "3", "--out", str(tmp_path)]) == 2
    assert "window" in capsys.readouterr().err


def test_maximal(tmp_path):
    out = tmp_path / "m"
    assert main(["maximal", "--seq", "gen:delta", "--lambda", "0.5", "--out", str(out)]) == 0
    rows = read_csv(out / "maximal_delta0_lam0.5.csv")
    assert [r["k"] for r in rows] == ["-2", "-1", "0", "1", "2"]
    assert rows[0]["kind"] == "maximal"


def test_hypothesis_linear(tmp_path):
    out = tmp_path / "h"
    assert main(["hypothesis", "--seq", "gen:delta", "--lambda", "0.5,0.4", "--translates", "linear",
                 "--horizon", "10", "--out", str(out)]) == 0
    rows = read_csv(out / "hypothesis_delta0.csv")
    assert rows == [
        {"lambda": "0.5", "lhs": "1", "rhs": "2", "ratio": "0.5"},
        {"lambda": "0.4", "lhs": "2", "rhs": "4", "ratio": "0.5"},
    ]


def test_hypothesis_greedy(tmp_path):
    out = tmp_path / "g"
    assert main(["hypothesis", "--seq", "gen:random:seed=3,support=20", "--lambda", "0.5",
                 "--translates", "greedy", "--horizon", "8", "--out", str(out)]) == 0


def test_ergodic(tmp_path):
    out = tmp_path / "e"
    code = main(["ergodic", "--system", "gen:cyclic:M=16", "--observable", "gen:indicator:points=0",
                 "--lambda", "0.6", "--horizon", "5", "--out", str(out)])
    assert code == 0
    rows = read_csv(out / "ergodic_lam0.6.csv")
    assert [r["measure"] for r in rows] == ["0.125"] * 5
    assert rows[-1]["cumulative"] == "0.625"


def test_ergodic_size_mismatch(tmp_path, capsys):
    obs = tmp_path / "f.json"
    obs.write_text('{"values": [1, 0]}')
    code = main(["ergodic", "--system", "gen:cyclic:M=16", "--observable", str(obs), "--lambda", "1",
                 "--out", str(tmp_path)])
    assert code == 2
    assert "observable" in capsys.readouterr().err


def test_validate_direct():
    with pytest.raises(ConfigError, match="horizon"):
        ExperimentConfig("complete-conv", [{"generator": "delta"}], [1.0], horizon=0).validate()
