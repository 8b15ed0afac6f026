from __future__ import annotations

import json

import pytest

from hkmodel import cli


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = cli.main(list(args) + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_fujiki_diag3(tmp_path):
    code, rep = run(["verify", "fujiki", "--preset", "diag3", "--n", "1"], tmp_path)
    assert code == 0 and rep["passed"]
    assert rep["results"]["C_n"] == "1/3"
    assert "wall_time" in rep


def test_so41(tmp_path):
    code, rep = run(["verify", "so41", "--n", "1"], tmp_path)
    assert code == 0
    assert rep["results"]["closure_dim"] == 10
    assert rep["results"]["killing"] == [4, 6]


def test_gtot_diag5(tmp_path):
    code, rep = run(["verify", "gtot", "--preset", "diag5", "--n", "2"], tmp_path)
    assert code == 0 and rep["results"]["dim"] == 21


def test_spinor_and_transport(tmp_path):
    code, rep = run(["verify", "spinor", "--preset", "diag4", "--cases", "5"], tmp_path)
    assert code == 0 and rep["results"]["pairs_checked"] == 20
    code, rep = run(["verify", "transport", "--preset", "k3type4", "--cases", "5"], tmp_path)
    assert code == 0
    assert sum(rep["results"]["verdict_counts"].values()) == 5


def test_unknown_verdict_does_not_fail(tmp_path):
    args = ["verify", "transport", "--preset", "k3type4",
            "--plane", '{"x": [1, 0, 0, 0], "y": [0, 1, 0, 0]}',
            "--phi", '[[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,1]]']
    code, rep = run(args, tmp_path)
    assert code == 0
    assert rep["results"]["cases"][0]["verdict"] == "unknown"


def test_transport_precondition_is_input_error(tmp_path, capsys):
    args = ["verify", "transport", "--preset", "k3type4",
            "--plane", '{"x": [1, 0, 0, 0], "y": [0, 1, 0, 0]}',
            "--plane2", '{"x": [0, 1, 0, 0], "y": [1, 0, 0, 0]}']
    code, rep = run(args, tmp_path)
    assert code == 2 and rep is None
    assert "Hodge isometry" in capsys.readouterr().err


def test_failed_assertion_exits_1(tmp_path, monkeypatch, capsys):
    monkeypatch.setitem(cli.RUNNERS, "spinor", lambda cfg: ({}, {"always_fails": False}))
    code, rep = run(["verify", "spinor", "--preset", "diag3"], tmp_path)
    assert code == 1 and rep["failed"] == ["always_fails"]
    assert "FAILED: always_fails" in capsys.readouterr().err


def test_build_and_reload_identical(tmp_path):
    code, manifest = run(["build", "--preset", "diag3", "--n", "1"], tmp_path, "m.json")
    assert code == 0 and manifest["dims"] == [1, 3, 1]
    first = (tmp_path / "m.json").read_bytes()
    assert cli.main(["build", "--reload", str(tmp_path / "m.json"), "--out", str(tmp_path / "r.json")]) == 0
    assert (tmp_path / "r.json").read_bytes() == first
    run(["build", "--preset", "diag3", "--n", "1"], tmp_path, "m2.json")
    assert (tmp_path / "m2.json").read_bytes() == first


@pytest.mark.parametrize("args", [
    ["build", "--preset", "diag3", "--n", "0"],
    ["verify", "fujiki", "--gram", "/does/not/exist.json"],
    ["verify", "fujiki", "--preset", "nope"],
    ["verify", "fujiki"],
    ["verify", "gtot", "--preset", "hyperbolic-u3e8", "--n", "2"],
    ["verify", "so41", "--n", "3"],
])
def test_input_errors_exit_2(args, tmp_path):
    assert cli.main(args) == 2


def test_malformed_rational(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"gram": [["1/0", "0"], ["0", "1"]]}')
    assert cli.main(["verify", "fujiki", "--gram", str(bad)]) == 2
    bad.write_text('{"gram": [[1.5, 0], [0, 1]]}')
    assert cli.main(["verify", "fujiki", "--gram", str(bad)]) == 2


def test_bad_json_reports_line(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"suite": "fujiki",\n "preset": "diag3", n: 1}')
    assert cli.main(["verify", "fujiki", "--config", str(cfg)]) == 2
    assert f"{cfg}:2:" in capsys.readouterr().err


def test_config_file(tmp_path):
    gram = tmp_path / "g.json"
    gram.write_text('{"gram": [["2", "1"], ["1", "-3"]]}')
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"suite": "fujiki", "gram_file": "g.json", "n": 2, "seed": 4}))
    loaded = cli.load_config(str(cfg))
    assert loaded.suite == "fujiki" and loaded.n == 2 and loaded.seed == 4
    code, rep = run(["verify", "fujiki", "--config", str(cfg)], tmp_path)
    assert code == 0 and rep["inputs"]["gram"] == [["2", "1"], ["1", "-3"]]


def test_preset_resolution():
    assert cli.load_preset("diag3") == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    names = cli.preset_names()
    assert {"diag3", "diag5", "hyperbolic-u3e8"} <= set(names)
    big = cli.load_preset("hyperbolic-u3e8")
    from hkmodel.quadspace import QuadraticSpace
    assert QuadraticSpace.from_rows(big).signature() == (3, 20, 0)


@pytest.mark.parametrize("args", [
    ["verify", "fujiki", "--preset", "k3type5", "--n", "2"],
    ["verify", "transport", "--preset", "k3type4", "--seed", "3", "--cases", "4"],
    ["verify", "spinor", "--preset", "split4", "--seed", "1", "--cases", "3"],
])
def test_reports_deterministic(args, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert cli.main(args + ["--no-wall-time", "--out", str(a)]) == 0
    assert cli.main(args + ["--no-wall-time", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_changes_randomized_checks(tmp_path):
    base = ["verify", "spinor", "--preset", "k3type4", "--cases", "2", "--no-wall-time"]
    _, a = run(base + ["--seed", "1"], tmp_path, "a.json")
    _, b = run(base + ["--seed", "2"], tmp_path, "b.json")
    assert a["results"]["pairs"] != b["results"]["pairs"]
