import json
from fractions import Fraction as F

import pytest

from topocache.cli import RunConfig, main, run
from topocache.errors import InvalidArgumentError


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_allocate(capsys):
    assert main(["allocate", "--L", "3,2,1", "--t", "2"]) == 0
    out = _json(capsys)
    assert out["gamma"] == ["9/11", "8/11", "5/11"] and out["S"] == 11


def test_bound_golden(capsys):
    assert main(["bound", "--L", "3,2,1", "--t", "2"]) == 0
    out = _json(capsys)
    assert out["general"] == out["regular"] == out["achievable"] == "6/11"
    assert out["certificate"] is True
    assert out["sequence"] == ["18/11", "12/11", "6/11", "0/1"]


def test_bound_fractional_all_p(capsys):
    assert main(["bound", "--L", "3,2,1", "--t", "3/2", "--all-p"]) == 0
    out = _json(capsys)
    assert out["regular"] is None
    assert F(out["general"]) <= F(out["achievable"]) == F(157, 132)


def test_place_deliver_round_trip(tmp_path, capsys):
    placement = tmp_path / "place.json"
    assert main(["place", "--L", "3,2,1", "--t", "2", "--out", str(placement)]) == 0
    capsys.readouterr()
    cfg = json.dumps({"placement": str(placement), "N": 6})
    assert main(["deliver", "--config", cfg, "--seed", "4"]) == 0
    out = _json(capsys)
    assert out == {"num_tx": 6, "S": 11, "T": "6/11", "decode_ok": True}


def test_deliver_fractional(capsys):
    assert main(["deliver", "--L", "3,2,1", "--t", "3/2"]) == 0
    out = _json(capsys)
    assert out["T"] == out["T_realized"] == "157/132"
    assert out["decode_ok"]


def test_deliver_config_file_and_flags_after_command(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"L": [2, 2], "t": 1, "demand": {"d": [5, 1, 2, 3], "users_per_cache": [[1, 3], [2, 4]]}, "N": 5}))
    assert main(["deliver", "--config", str(cfg), "-v"]) == 0
    assert _json(capsys)["T"] == "1/1"


def test_mismatch(capsys):
    cfg = json.dumps({"L_assumed": [2, 1, 1], "L_realized": [1, 2, 1], "t": 1})
    assert main(["mismatch", "--config", cfg]) == 0
    out = _json(capsys)
    assert out["T_achievable"] == out["T_converse"] == "2/1"
    assert out["leaders"] == [2, 3] and out["num_tx"] == 8 and out["decode_ok"]


def test_mismatch_rejects_fractional_t(capsys):
    cfg = json.dumps({"L_assumed": [2, 1], "L_realized": [1, 2], "t": "1/2"})
    assert main(["mismatch", "--config", cfg]) == 1


def test_verify(capsys):
    assert main(["verify", "--suite", "coefficients", "--suite", "lp-point"]) == 0
    err = capsys.readouterr().err
    assert err.count("PASS") == 2 and "FAIL" not in err


def test_simulate_stdout_and_files(tmp_path, capsys):
    argv = ["simulate", "--means", "4,2,1", "--t", "1:2", "--samples", "50", "--seed", "7"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("t,mean_T_mismatch") and len(lines) == 3
    assert main(argv + ["--out", str(tmp_path / "c.csv")]) == 0
    assert (tmp_path / "c.csv").read_text().splitlines() == lines
    assert (tmp_path / "c.json").exists()


@pytest.mark.parametrize("argv", [
    ["allocate", "--L", "3,2,1", "--t", "5"],
    ["allocate", "--L", "3,0,1", "--t", "1"],
    ["allocate", "--t", "1"],
    ["bound", "--L", "x", "--t", "1"],
    ["place", "--config", "{not json"],
    ["place", "--config", "/nonexistent/cfg.json"],
    ["place", "--L", "6,6,6,6,6,6", "--t", "3", "--budget", "10"],
    ["simulate", "--means", "1,0"],
    ["simulate", "--means", "1,1", "--t", "a:b"],
    ["frobnicate"],
    ["deliver", "--L", "1,1", "--t", "1", "--config", '{"demand": [1, 2]}'],
    ["bound", "--L", "1", "--t", "1", "--seed", "-1"],
])
def test_invalid_inputs_exit_one(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_run_config_validation():
    with pytest.raises(InvalidArgumentError):
        RunConfig("nope")
    with pytest.raises(InvalidArgumentError):
        RunConfig("bound", budget=0)


def test_verification_failure_exits_two(monkeypatch, capsys):
    from topocache import cli

    monkeypatch.setitem(cli.HANDLERS, "verify", lambda rc: {"suites": [], "all_passed": False})
    assert run(RunConfig("verify")) == 2
