import json

import pytest

from kirchberg.cli import main
from kirchberg.graphs import cuntz_graph
from kirchberg.suites import linf_pair_model as make_model


@pytest.fixture
def files(tmp_path):
    (tmp_path / "cuntz3.graph").write_text(json.dumps(cuntz_graph(3).to_data()))
    (tmp_path / "model.hyb").write_text(json.dumps(make_model().to_data()))
    return tmp_path


def test_k_graph(files, capsys):
    assert main(["k-graph", str(files / "cuntz3.graph")]) == 0
    assert capsys.readouterr().out == "K0 = Z/2, K1 = 0\n"


def test_k_graph_structured(files, capsys):
    assert main(["k-graph", str(files / "cuntz3.graph"), "--format", "structured"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["schema"].startswith("kirchberg-report/") and out["k0"] == "Z/2"


def test_missing_file_is_input_error(files, capsys):
    assert main(["k-model", str(files / "missing.hyb")]) == 2
    assert "missing.hyb" in capsys.readouterr().err


def test_parse_error_has_position(files, capsys):
    bad = files / "bad.graph"
    bad.write_text('{"name": "x",\n  "vertices": ]}')
    assert main(["k-graph", str(bad)]) == 2
    assert "bad.graph:2:" in capsys.readouterr().err


def test_verify_partition_on_model_file(files, capsys):
    assert main(["verify", "partition", "--k", "1", str(files / "model.hyb")]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "census" in out


def test_verify_rejects_model_for_k_suites(files):
    assert main(["verify", "kgraph", str(files / "model.hyb")]) == 2


def test_reports_are_reproducible(files, capsys):
    args = ["verify", "reducer", "--cases", "40", "--format", "structured"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first


def test_design_and_back(files, capsys):
    out = files / "designed.hyb"
    assert main(["design", "(Z/5, 0); (Z, 0)", "--emit-model", str(out)]) == 0
    capsys.readouterr()
    assert main(["k-model", str(out)]) == 0
    assert capsys.readouterr().out == "K0 = Z (+) Z/5, K1 = 0\n"


def test_design_unsatisfiable_exits_one(capsys):
    assert main(["design", "(Z/13, 0)"]) == 1
    assert "cannot realize" in capsys.readouterr().out


def test_bratteli_dot(files, capsys):
    assert main(["bratteli", str(files / "model.hyb"), "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("digraph bratteli")


def test_catalog(capsys, tmp_path):
    assert main(["catalog"]) == 0
    assert "PASS" in capsys.readouterr().out
    dump = tmp_path / "cat.json"
    assert main(["catalog", "--dump", "--output", str(dump)]) == 0
    assert main(["catalog", "--catalog", str(dump)]) == 0
