import json

import pytest

from hypercurrent.cli import main
from hypercurrent.complex_core import dumps_complex, sphere_complex, torsion_complex


@pytest.fixture
def sphere1_file(tmp_path):
    path = tmp_path / "sphere1.json"
    path.write_text(dumps_complex(sphere_complex(1)))
    return str(path)


@pytest.fixture
def tor_file(tmp_path):
    path = tmp_path / "tor.json"
    path.write_text(dumps_complex(torsion_complex()))
    return str(path)


def test_complex_validate(sphere1_file, capsys):
    assert main(["complex", "validate", sphere1_file]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] and report["cells"] == [2, 2]
    assert "input_hash" in report and "config" in report


def test_complex_betti(tor_file, capsys):
    assert main(["complex", "betti", tor_file]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["betti"] == [1, 0, 1]


def test_complex_validate_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "name": "bad",
                "cells": [["v", "w"], ["a"], ["f"]],
                "boundary": [[[1], [-1]], [[1]]],
            }
        )
    )
    assert main(["complex", "validate", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file_is_validation_error(capsys):
    assert main(["complex", "validate", "/nonexistent.json"]) == 2


def test_trees_enumerate(tor_file, capsys):
    assert main(["trees", "enumerate", tor_file, "--p", "0", "--q", "2", "--level", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["trees"] == [
        {"cells": ["u"], "torsion": 2},
        {"cells": ["w"], "torsion": 3},
    ]


def test_trees_greedy(tor_file, tmp_path, capsys):
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps({"u": 5.0, "w": 1.0}))
    assert main(
        ["trees", "greedy", tor_file, "--p", "0", "--q", "2", "--level", "2",
         "--weights", str(wfile)]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tree"]["cells"] == ["w"]
    assert report["tree"]["total_weight"] == 1.0


def test_protocol_check_builtin(capsys):
    assert main(["protocol", "check", "builtin:square"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["good"] is True


def test_protocol_strata(capsys):
    assert main(["protocol", "strata", "builtin:cube_sphere:2"]) == 0
    report = json.loads(capsys.readouterr().out)
    ks = [s["k"] for s in report["simplices"] if len(s["vertices"]) == 3]
    assert len(ks) == 12 and all(k in (0, 1, 2) for k in ks)


def test_topo_current_square(capsys):
    assert main(["topo", "current", "builtin:square"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert sorted(report["chain"]) == ["e1+", "e1-"]
    vals = set(report["chain"].values())
    assert vals in ({"1/1"}, {"-1/1"})
    assert report["class"] in (["1/1"], ["-1/1"])


def test_topo_current_matches_library(capsys):
    from hypercurrent.protocol import cube_sphere_protocol
    from hypercurrent.topo_hyper import hypercurrent_homology

    assert main(["topo", "current", "builtin:cube_sphere:2"]) == 0
    report = json.loads(capsys.readouterr().out)
    proto = cube_sphere_protocol(2)
    coords, chain = hypercurrent_homology(proto, proto.fundamental_cycle, [1])
    expected = {
        proto.gap.cells_at(2)[i]: f"{v.numerator}/{v.denominator}"
        for i, v in enumerate(chain)
        if v
    }
    assert report["chain"] == expected


def test_ana_axioms(capsys):
    assert main(
        ["ana", "axioms", "builtin:square", "--beta", "3", "--samples", "5",
         "--tol", "1e-5"]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["violations"] == 0
    assert report["continuity"] <= 1e-5


def test_ana_integrate(capsys):
    assert main(["ana", "integrate", "builtin:square", "--beta", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["residual"] <= 1e-6
    assert any(len(s["vertices"]) == 2 for s in report["simplices"])


def test_quantize_writes_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(
        ["quantize", "builtin:square", "--betas", "5,15", "--out", str(out)]
    ) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["csv"] == str(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("beta,class_0,distance")
    assert len(lines) == 3


def test_quantize_rejects_descending_betas(capsys):
    assert main(["quantize", "builtin:square", "--betas", "10,5"]) == 2


def test_weightspace_report(sphere1_file, capsys):
    assert main(["weightspace", "report", sphere1_file, "--p", "0", "--q", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["summands"] == 1
    assert report["inessential"] == 0
    assert report["robust_summands"] == 1
    assert report["cells"][0]["essential"] is True


def test_weightspace_contractible(tor_file, capsys):
    assert main(["weightspace", "report", tor_file, "--p", "0", "--q", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["contractible"] is True and report["summands"] == 0


def test_dyn_evolve(tmp_path, capsys):
    proto_doc = {
        "complex": {"builtin": "sphere", "q": 1},
        "p": 0,
        "q": 1,
        "vertices": [
            {"id": "t0", "weights": {"0": [0.0, 0.3], "1": [0.0, 0.0]}},
            {"id": "t1", "weights": {"0": [0.3, 0.0], "1": [0.0, 0.0]}},
        ],
        "simplices": [{"vertices": ["t0", "t1"]}],
    }
    pfile = tmp_path / "proto.json"
    pfile.write_text(json.dumps(proto_doc))
    p0file = tmp_path / "p0.json"
    p0file.write_text(json.dumps([1.0, 0.0]))
    out = tmp_path / "traj.csv"
    assert main(
        ["dyn", "evolve", str(pfile), "--p0", str(p0file), "--t0", "0", "--t1", "2",
         "--steps", "50", "--tol", "1e-6", "--out", str(out)]
    ) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["mass_drift"] <= 1e-9
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,e0+,e0-"
    assert len(lines) == 52


def test_demo_q1(tmp_path, capsys):
    out = tmp_path / "demo.csv"
    assert main(["demo", "--q", "1", "--betas", "5,10", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "sphere" in text and "wedge" in text
    assert out.exists()


def test_reports_are_deterministic(sphere1_file, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    main(["complex", "betti", sphere1_file, "--out", str(out1)])
    main(["complex", "betti", sphere1_file, "--out", str(out2)])
    assert out1.read_text() == out2.read_text()
