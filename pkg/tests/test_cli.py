import json

import pytest
from click.testing import CliRunner

from cli import cli
from shadowcalc import serialization as io
from shadowcalc.base_finset import BaseObject
from shadowcalc.colorings import Coloring
from shadowcalc.named_ops import figure_unit

B = BaseObject((0, 1), name="B")


@pytest.fixture
def runner(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SHADOWCALC_SEED", raising=False)
    return CliRunner()


def write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def stderr_json(result):
    # log lines come first on stderr
    text = result.stderr
    return json.loads(text[text.rindex("{\n  \"error\""):])


def test_validate_valid_graph(runner, tmp_path, black_path):
    path = write(tmp_path / "g.json", io.labeled_graph_to_json(black_path))
    result = runner.invoke(cli, ["validate", path, "--kind", "labeled-graph"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["valid"] is True


def test_validate_invalid_graph(runner, tmp_path):
    doc = {"vertices": [{"id": 1, "color": "white"}, {"id": 2, "color": "white"}], "edges": []}
    path = write(tmp_path / "g.json", doc)
    result = runner.invoke(cli, ["validate", path, "--kind", "graph"])
    assert result.exit_code == 2
    codes = {i["code"] for i in json.loads(result.stdout)["issues"]}
    assert "IsolatedVertex" in codes


def test_malformed_json_reports_on_stderr(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"vertices": [', encoding="utf-8")
    result = runner.invoke(cli, ["validate", str(path), "--kind", "graph"])
    assert result.exit_code == 2
    assert result.stdout == ""
    assert stderr_json(result)["error"]["code"] == "ParseError"


def test_coloring_needs_graph(runner, tmp_path, black_path):
    path = write(tmp_path / "c.json", io.coloring_to_json(Coloring.all_white(black_path)))
    result = runner.invoke(cli, ["validate", path, "--kind", "coloring"])
    assert result.exit_code == 2


def test_gray_edges(runner, tmp_path, black_path):
    g = write(tmp_path / "g.json", io.labeled_graph_to_json(black_path))
    c = write(tmp_path / "c.json", io.coloring_to_json(Coloring.of(black_path, {101: "gray"})))
    result = runner.invoke(cli, ["gray-edges", g, "--coloring", c])
    assert result.exit_code == 0
    assert [s["rep"] for s in json.loads(result.stdout)["grayEdges"]] == [1, 3]


def test_cut_with_explicit_set(runner, tmp_path, black_path):
    g = write(tmp_path / "g.json", io.labeled_graph_to_json(black_path))
    result = runner.invoke(cli, ["cut", g, "--cut-set", "101,103"])
    assert result.exit_code == 0
    assert "vertices" in json.loads(result.stdout)
    bad = runner.invoke(cli, ["cut", g, "--cut-set", "101,x"])
    assert bad.exit_code == 2


def test_plan_and_eval(runner, tmp_path):
    fig = figure_unit(B)
    m = write(tmp_path / "unit.json", io.labeled_map_to_json(fig.map))
    planned = runner.invoke(cli, ["plan", m])
    assert planned.exit_code == 0
    assert json.loads(planned.stdout)["length"] == 4

    req = write(tmp_path / "req.json", {"map": io.labeled_map_to_json(fig.map), "inputs": [],
                                        "output": list(fig.output)})
    out = tmp_path / "out.json"
    result = runner.invoke(cli, ["--backend", "matrix", "--out", str(out), "eval", req])
    assert result.exit_code == 0
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["backend"] == "matrix"
    assert data["summary"]["ranks"] == [[1, 0], [0, 1]]


def test_check_exit_codes(runner, tmp_path, black_path):
    g = write(tmp_path / "g.json", io.labeled_graph_to_json(black_path))
    ok = runner.invoke(cli, ["check", g])
    assert ok.exit_code == 0
    assert json.loads(ok.stdout)["coherent"] is True
    assert runner.invoke(cli, ["check", g, "--expect", "incoherent"]).exit_code == 3


def test_export_dot(runner, tmp_path, black_path):
    g = write(tmp_path / "g.json", io.labeled_graph_to_json(black_path))
    result = runner.invoke(cli, ["export-dot", g])
    assert result.exit_code == 0
    assert result.stdout.startswith("graph G {")


def test_suite_d_table(runner, tmp_path):
    pdf = tmp_path / "report.pdf"
    result = runner.invoke(cli, ["--seed", "5", "suite", "--suite", "d-table", "--pdf", str(pdf)])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["passed"] is True
    assert data["settings"]["seed"] == 5
    assert [r["name"] for r in data["reports"]] == ["d-table"]
    assert pdf.exists()


def test_unknown_suite_is_an_engine_error(runner):
    result = runner.invoke(cli, ["suite", "--suite", "no-such-suite"])
    assert result.exit_code == 1


def test_bad_config_file(runner, tmp_path):
    (tmp_path / "shadowcalc.toml").write_text('backend = "sparse"\n', encoding="utf-8")
    bad = runner.invoke(cli, ["--config", str(tmp_path / "shadowcalc.toml"), "check", "missing.json"])
    assert bad.exit_code == 2


def test_suite_rotation_negative_is_expected(runner):
    result = runner.invoke(cli, ["suite", "--suite", "rotation-negative", "--instances", "2"])
    assert result.exit_code == 0
    (report,) = json.loads(result.stdout)["reports"]
    assert report["verdict"] == "unequal-as-expected"


def test_suite_options_override_the_group(runner):
    result = runner.invoke(cli, ["--seed", "5", "--backend", "family", "suite", "--suite", "d-table",
                                 "--seed", "3", "--backend", "matrix"])
    assert result.exit_code == 0
    settings = json.loads(result.stdout)["settings"]
    assert settings["seed"] == 3
    assert settings["backend"] == "matrix"


def test_suite_seed_yields_to_environment(runner, monkeypatch):
    monkeypatch.setenv("SHADOWCALC_SEED", "11")
    result = runner.invoke(cli, ["suite", "--suite", "d-table", "--seed", "3"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["settings"]["seed"] == 11
