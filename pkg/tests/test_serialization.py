import json

import pytest

from shadowcalc import serialization as io
from shadowcalc.base_finset import BaseMap, BaseObject, LabeledProduct
from shadowcalc.colorings import Coloring
from shadowcalc.errors import ParseError
from shadowcalc.families import Family
from shadowcalc.labeled_graphs import darkening, maximal_cut
from shadowcalc.named_ops import figure_pull, figure_unit
from shadowcalc.plans import plan_from

B = BaseObject((0, 1), name="B")


def unit_request(backend="family"):
    fig = figure_unit(B)
    return {"map": io.labeled_map_to_json(fig.map), "inputs": [], "output": list(fig.output), "backend": backend}


def test_json_errors_carry_position():
    with pytest.raises(ParseError) as info:
        io.parse_text('{\n  "vertices": [,\n  "edges": []}', "graph")
    assert info.value.line == 2
    assert info.value.column > 0
    assert io.error_to_json(info.value)["line"] == 2


def test_schema_errors_name_the_path():
    with pytest.raises(ParseError, match="edges/0"):
        io.parse_text('{"vertices": [], "edges": [{"id": 1}]}', "graph")


def test_unknown_kind():
    with pytest.raises(ParseError):
        io.parse_text("{}", "hypergraph")


def test_duplicate_elements_are_parse_errors():
    with pytest.raises(ParseError):
        io.base_object_from_json({"elems": [1, 1]})


def test_array_elements_decode_to_tuples():
    X = io.base_object_from_json({"elems": [[0, "a"], [1, "b"]], "name": "P"})
    assert X.elems == ((0, "a"), (1, "b"))
    f = io.base_map_from_json({"map": {'[0,"a"]': 1, '[1,"b"]': 0}, "source": io.base_object_to_json(X),
                               "target": {"elems": [0, 1]}})
    assert f.table == (1, 0)


def test_labeled_graph_survives_a_round_trip(black_path):
    G = black_path
    back = io.labeled_graph_from_json(json.loads(io.dumps(io.labeled_graph_to_json(G))))
    assert back.graph == G.graph
    assert back.orient == G.orient
    assert back.edge_label == G.edge_label


def test_labeled_map_keeps_vertex_labels():
    f = BaseMap(B, B, (1, 0))
    P = figure_unit(B).map
    doc = io.labeled_map_to_json(P)
    assert set(doc) == {"source", "target", "vmap", "emap", "iota"}
    back = io.labeled_map_from_json(doc)
    assert back.underlying == P.underlying
    assert io.base_map_from_json(io.base_map_to_json(f)) == f


def test_coloring_defaults_to_white(black_path):
    c = io.coloring_from_json({"colors": {"101": "gray"}}, black_path)
    assert c == Coloring.of(black_path, {101: "gray"})
    assert io.coloring_to_json(c)["colors"]["103"] == "white"


def test_family_and_matrix_documents(square_base):
    X = Family.from_counts(square_base, {(0, 1): 2})
    assert io.family_from_json(io.family_to_json(X)) == X
    M = io.matrix_object_from_json({"base": io.labeled_product_to_json(square_base),
                                    "ranks": [{"anchor": [1, 1], "rank": 2}]})
    assert M.ranks()[(1, 1)] == 2
    with pytest.raises(ParseError):
        io.matrix_object_from_json({"base": io.labeled_product_to_json(square_base),
                                    "ranks": [{"anchor": [1, 1], "rank": 2, "labels": ["x"]}]})


@pytest.mark.parametrize("backend", ["family", "matrix"])
def test_eval_request_of_the_unit(backend):
    out = io.eval_request(unit_request(backend))
    key = "cardinalities" if backend == "family" else "ranks"
    assert out["backend"] == backend
    assert out["summary"][key] == [[1, 0], [0, 1]]
    assert out["summary"]["total"] == 2


def test_eval_request_with_an_input():
    pt = BaseObject((0,), name="pt")
    f = BaseMap(B, pt, (0, 0))
    fig = figure_pull(f)
    X = Family.from_counts(LabeledProduct.of({0: pt}), {(0,): 3})
    req = {"map": io.labeled_map_to_json(fig.map), "output": list(fig.output),
           "inputs": [{"edges": list(fig.inputs[0]), "value": io.family_to_json(X)}]}
    assert io.eval_request(req)["summary"]["cardinalities"] == [3, 3]


def test_plan_document():
    doc = io.plan_to_json(plan_from(figure_unit(B).map))
    assert doc["length"] == 4
    assert [s["kind"] for s in doc["steps"]] == ["tensor", "pull", "push", "graph"]


def test_dumps_sorts_keys_and_keeps_unicode():
    text = io.dumps({"b": "⊠", "a": 1})
    assert text.index('"a"') < text.index('"b"')
    assert "⊠" in text


def test_dot_export(black_path):
    dot = io.graph_to_dot(black_path, Coloring.of(black_path, {101: "gray"}))
    assert dot.startswith("graph G {")
    assert "v101 [shape=circle, style=filled, fillcolor=gray70" in dot
    assert 'v101 -- v102 [label="e2: B(2)"]' in dot
    cut = io.constellation_to_dot(maximal_cut(darkening(black_path, [101])))
    assert "subgraph cluster_101" in cut
