import json
import re
import subprocess
import sys

import numpy as np
import pytest

from homgeo.catalog import catalog, compare_components
from homgeo.cli import main, reproduce_examples, run
from homgeo.config import ConfigError, config_hash, dumps, parse_config

UNIMODULAR = {"command": "geodesic-vectors",
              "algebra": {"frame": {"type": "milnor_unimodular", "lambda": [1.0, 1.0, 1.0]}},
              "drift": [0.3, 0.0, 0.0], "solver": {"seeds": 200}}


def write(tmp_path, cfg, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def test_run_geodesic_vectors():
    rep = run(UNIMODULAR)
    comps = rep["results"]["components"]
    assert len(comps) == 1 and comps[0]["dim"] == 1
    assert rep["seed"] == 0 and rep["command"] == "geodesic-vectors"
    assert rep["config_hash"] == config_hash(UNIMODULAR)


def test_run_every_command():
    base = {"algebra": {"frame": {"type": "heisenberg"}}, "drift": [0.0, 0.0, 0.3],
            "vector": [1.0, 0.0, 0.0], "samples": 20, "solver": {"seeds": 30}}
    out = {cmd: run({**base, "command": cmd})["results"]
           for cmd in ("berwald", "biinvariance", "ricci", "milnor-lemma", "classify")}
    assert out["berwald"]["is_berwald"] is False
    assert out["ricci"]["ricci"] == pytest.approx(-0.5)
    assert out["milnor-lemma"]["verdict"] == "pass"
    assert out["classify"]["jacobi_defect"] == 0
    so3 = {"command": "orbit-critical", "algebra": {"frame": {"type": "milnor_unimodular",
                                                              "lambda": [1, 1, 1]}},
           "drift": [0.3, 0, 0], "vector": [1, 0, 0], "solver": {"seeds": 10}}
    res = run(so3)["results"]
    assert res["count"] == 2


def test_explicit_structure_upper_entries_only():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = c[1, 2, 0] = 1.0
    c[2, 0, 1] = 1.0
    cfg = {"command": "ricci", "algebra": {"structure": c.tolist()}, "vector": [1, 0, 0]}
    assert run(cfg)["results"]["ricci"] == pytest.approx(0.5)


def test_schema_errors_name_the_field():
    bad = {**UNIMODULAR, "metric": [[1, 0.5, 0], [0, 1, 0], [0, 0, 1]]}
    with pytest.raises(ConfigError) as exc:
        parse_config(bad)
    assert exc.value.path == "metric"
    cases = [({**UNIMODULAR, "drift": [1.5, 0, 0]}, "drift"),
             ({**UNIMODULAR, "drift": [0.1, 0]}, "drift"),
             ({**UNIMODULAR, "metric": [[1, 0], [0, 1]]}, "metric"),
             ({**UNIMODULAR, "command": "fly"}, "command"),
             ({**UNIMODULAR, "solver": {"seeds": 0}}, "solver/seeds"),
             ({**UNIMODULAR, "extra": 1}, ""),
             ({**UNIMODULAR, "command": "ricci"}, "vector"),
             ({"command": "berwald", "algebra": {"frame": {"type": "milnor_nonunimodular",
                                                           "params": [1, 0, 0, 0]}}},
              "algebra/frame/params")]
    for cfg, path in cases:
        with pytest.raises(ConfigError) as exc:
            parse_config(cfg)
        assert exc.value.path == path, (cfg, exc.value)


def test_jacobi_warning():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1, -1
    c[1, 2, 1], c[2, 1, 1] = 1, -1
    job = parse_config({"command": "berwald", "algebra": {"structure": c.tolist()}})
    assert any("Jacobi" in w for w in job.warnings)


def test_seventeen_digit_floats():
    text = dumps({"x": 0.1, "y": [1.0, 2.5e-20], "z": np.float64(1 / 3), "n": 3, "b": True})
    assert "0.10000000000000001" in text
    assert "0.33333333333333331" in text
    assert json.loads(text)["z"] == 1 / 3
    assert re.search(r'"n": 3\b', text) and '"b": true' in text


def test_round_trip_is_deterministic(tmp_path):
    first = run(UNIMODULAR)
    again = run(json.loads(json.dumps(first["config"])))
    assert dumps(first["results"]) == dumps(again["results"])
    assert first["config_hash"] == again["config_hash"]


def test_main_run_and_validate(tmp_path, capsys):
    cfg = write(tmp_path, UNIMODULAR)
    out = tmp_path / "report.json"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["results"]["components"][0]["type"] == "linear_subspace"
    assert main(["validate", "--config", str(cfg)]) == 0
    assert "ok" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, {**UNIMODULAR, "metric": [[1, 2, 0], [0, 1, 0], [0, 0, 1]]}, "bad.json")
    assert main(["run", "--config", str(bad)]) == 2
    assert "metric" in capsys.readouterr().err
    assert main(["validate", "--config", str(bad)]) == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert main(["validate", "--config", str(garbled)]) == 2
    hopeless = write(tmp_path, {**UNIMODULAR, "algebra": {"frame": {"type": "milnor_unimodular",
                                                                    "lambda": [1, 2, 3]}},
                                "solver": {"seeds": 3, "max_iter": 1, "tolerance": 1e-300}},
                     "hopeless.json")
    assert main(["run", "--config", str(hopeless)]) == 1
    assert "computation failed" in capsys.readouterr().err


def test_console_script(tmp_path):
    cfg = write(tmp_path, {"command": "ricci", "algebra": {"frame": {"type": "heisenberg"}},
                           "vector": [1, 0, 0]})
    proc = subprocess.run([sys.executable, "-m", "homgeo.cli", "run", "--config", str(cfg)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["results"]["ricci"] == pytest.approx(-0.5)


def test_catalog_contents():
    names = [e.name for e in catalog()]
    assert "example-5.1-unimodular-equal" in names
    assert "example-5.1-nonunimodular-beta0" in names
    assert len(names) == len(set(names)) == 7


def test_compare_components_reports_mismatch():
    reported = [{"type": "linear_subspace", "dim": 1, "basis": [[0.0, 1.0, 0.0]]}]
    assert compare_components(reported, [[[0.0, 1.0, 0.0]]]) == []
    diffs = compare_components(reported, [[[1.0, 0.0, 0.0]]])
    assert diffs and "no verified component" in diffs[-1]
    diffs = compare_components(reported, [[[0.0, 1.0, 0.0]]], contained_lines=[[0, 0, 1]])
    assert diffs and "not contained" in diffs[0]


def test_reproduce_examples(tmp_path, capsys):
    summary = reproduce_examples()
    assert summary["passed"], [e["diff"] for e in summary["entries"] if not e["passed"]]
    assert main(["reproduce-examples", "--out", str(tmp_path / "reports")]) == 0
    printed = capsys.readouterr().out
    assert printed.count("[PASS]") == 7
    files = sorted(p.name for p in (tmp_path / "reports").iterdir())
    assert "summary.json" in files and len(files) == 8


def test_structure_with_contradictory_pair():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, 1.0
    with pytest.raises(ConfigError) as exc:
        parse_config({"command": "berwald", "algebra": {"structure": c.tolist()}})
    assert exc.value.path == "algebra/structure"
